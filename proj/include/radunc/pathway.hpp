#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radunc/csv.hpp"
#include "radunc/detail/strings.hpp"
#include "radunc/error.hpp"
#include "radunc/model.hpp"

namespace radunc {

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

namespace views {

inline const std::vector<std::string>& projections() {
    static const std::vector<std::string> v{"ap", "pa", "lateral"};
    return v;
}

inline const std::vector<std::string>& orientations() {
    static const std::vector<std::string> v{"erect", "semi-erect", "supine", "decubitus"};
    return v;
}

inline bool is_projection(const std::string& t) {
    const auto& p = projections();
    return std::find(p.begin(), p.end(), t) != p.end();
}

inline bool is_orientation(const std::string& t) {
    const auto& o = orientations();
    return std::find(o.begin(), o.end(), t) != o.end();
}

inline bool is_descriptor(const std::string& t) { return is_projection(t) || is_orientation(t); }

/// Known descriptors in projection-then-orientation order, anything else
/// alphabetically after them.
inline std::vector<std::string> ordered(const std::set<std::string>& set) {
    std::vector<std::string> out;
    for (const auto& p : projections()) {
        if (set.count(p)) out.push_back(p);
    }
    for (const auto& o : orientations()) {
        if (set.count(o)) out.push_back(o);
    }
    for (const auto& t : set) {
        if (!is_descriptor(t)) out.push_back(t);
    }
    return out;
}

inline std::string format(const std::set<std::string>& set) { return detail::join(ordered(set), ", "); }

} // namespace views

// ---------------------------------------------------------------------------
// DSL
// ---------------------------------------------------------------------------

/// Expected evidence under a diagnosis. Node attributes refine the attributes
/// a child record inherits from its parent.
struct PathwayNode {
    std::string finding;
    Status status = Status::dp;
    std::optional<std::string> location;
    std::set<std::string> attributes;

    friend bool operator==(const PathwayNode&, const PathwayNode&) = default;
};

struct PathwayVariant {
    std::string diagnosis;
    std::string name;
    std::set<std::string> views;
    std::set<std::string> trigger_attributes;
    std::optional<std::string> trigger_location_class;
    std::vector<PathwayNode> children;

    friend bool operator==(const PathwayVariant&, const PathwayVariant&) = default;
};

/// Parses one pathway line: `&&`-joined branches of `>`-joined `key: value`
/// segments. Only `views` and `children` of the result are populated.
inline PathwayVariant parse_pathway(std::string_view line) {
    if (detail::trim(line).empty()) throw Error(ErrorCode::EmptyLine, "empty pathway line");
    PathwayVariant variant;
    bool view_seen = false;
    for (const auto& branch_text : detail::split(line, "&&")) {
        PathwayNode node;
        bool has_ent = false;
        bool has_status = false;
        bool has_loc = false;
        bool has_attr = false;
        bool branch_has_content = false;
        for (const auto& segment : detail::split(branch_text, '>')) {
            auto seg = detail::trim(segment);
            if (seg.empty()) throw Error(ErrorCode::ParseError, "empty segment in '" + std::string(line) + "'");
            auto colon = seg.find(':');
            if (colon == std::string_view::npos) {
                throw Error(ErrorCode::ParseError, "segment '" + std::string(seg) + "' lacks 'key:'");
            }
            const std::string key = detail::canonicalize(seg.substr(0, colon));
            const std::string_view raw = seg.substr(colon + 1);
            std::vector<std::string> values;
            for (const auto& v : detail::split(raw, ',')) {
                auto c = detail::canonicalize(v);
                if (!c.empty()) values.push_back(std::move(c));
            }
            auto once = [&](bool& seen) {
                if (seen) throw Error(ErrorCode::DuplicateKey, "key '" + key + "' repeated in a branch");
                seen = true;
            };
            if (key == "view") {
                if (view_seen) throw Error(ErrorCode::DuplicateKey, "view given more than once");
                view_seen = true;
                for (auto& v : values) variant.views.insert(v);
                continue;
            }
            branch_has_content = true;
            if (key == "ent") {
                once(has_ent);
                if (values.size() != 1) throw Error(ErrorCode::MissingEntity, "ent needs exactly one value");
                node.finding = values.front();
            } else if (key == "status") {
                once(has_status);
                if (values.size() != 1) throw Error(ErrorCode::MissingStatus, "status needs exactly one value");
                auto st = parse_status(values.front());
                if (!st || is_tentative(*st)) {
                    throw Error(ErrorCode::InvalidStatus, "pathway status must be dp or dn, got '" + values.front() + "'");
                }
                node.status = *st;
            } else if (key == "loc") {
                once(has_loc);
                if (values.size() != 1) throw Error(ErrorCode::ParseError, "loc needs exactly one value");
                node.location = values.front();
            } else if (key == "attr") {
                once(has_attr);
                if (values.empty()) throw Error(ErrorCode::ParseError, "attr needs at least one value");
                node.attributes.insert(values.begin(), values.end());
            } else {
                throw Error(ErrorCode::UnknownKey, "unknown pathway key '" + key + "'");
            }
        }
        if (!has_ent) {
            throw Error(ErrorCode::MissingEntity,
                        branch_has_content || !view_seen ? "branch without ent" : "pathway has no entity");
        }
        if (!has_status) throw Error(ErrorCode::MissingStatus, "branch for '" + node.finding + "' has no status");
        variant.children.push_back(std::move(node));
    }
    return variant;
}

/// Inverse of parse_pathway in the conventional segment order.
inline std::string serialize_pathway(const PathwayVariant& variant) {
    std::string out;
    for (std::size_t i = 0; i < variant.children.size(); ++i) {
        const auto& n = variant.children[i];
        if (i == 0) {
            if (!variant.views.empty()) out += "view: " + views::format(variant.views) + " > ";
        } else {
            out += " && ";
        }
        out += "ent: " + n.finding + " > status: " + std::string(to_string(n.status));
        if (n.location) out += " > loc: " + *n.location;
        if (!n.attributes.empty()) out += " > attr: " + detail::join(n.attributes, ", ");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization tables
// ---------------------------------------------------------------------------

/// Whole-term synonym map. Chains are followed to their end at construction,
/// so normalize is idempotent.
class SynonymTable {
public:
    SynonymTable() = default;

    explicit SynonymTable(const std::map<std::string, std::string>& raw) {
        std::map<std::string, std::string> canon;
        for (const auto& [s, n] : raw) {
            auto key = detail::canonicalize(s);
            auto value = detail::canonicalize(n);
            if (key.empty() || value.empty()) throw Error(ErrorCode::DictionaryInvalid, "empty synonym entry");
            if (key == value) continue;
            auto [it, inserted] = canon.emplace(key, value);
            if (!inserted && it->second != value) {
                throw Error(ErrorCode::DictionaryInvalid, "synonym '" + key + "' maps to both '" + it->second +
                                                              "' and '" + value + "'");
            }
        }
        for (const auto& [key, value] : canon) {
            std::string target = value;
            std::set<std::string> seen{key};
            while (true) {
                auto it = canon.find(target);
                if (it == canon.end()) break;
                if (!seen.insert(target).second) {
                    throw Error(ErrorCode::DictionaryInvalid, "synonym cycle through '" + key + "'");
                }
                target = it->second;
            }
            if (target != key) m_map.emplace(key, target);
        }
    }

    static SynonymTable from_csv(const csv::Table& table) {
        table.require_columns({"surface", "normalized"});
        std::map<std::string, std::string> raw;
        for (std::size_t r = 0; r < table.size(); ++r) {
            auto key = detail::canonicalize(table.at(r, "surface"));
            auto value = table.at(r, "normalized");
            auto [it, inserted] = raw.emplace(key, value);
            if (!inserted && detail::canonicalize(it->second) != detail::canonicalize(value)) {
                throw Error(ErrorCode::DictionaryInvalid, table.origin() + ": conflicting synonyms for '" + key + "'");
            }
        }
        return SynonymTable(raw);
    }

    std::string normalize(std::string_view term) const {
        auto c = detail::canonicalize(term);
        auto it = m_map.find(c);
        return it == m_map.end() ? c : it->second;
    }

    std::size_t size() const { return m_map.size(); }
    const std::map<std::string, std::string>& entries() const { return m_map; }

private:
    std::map<std::string, std::string> m_map;
};

inline std::string normalize(std::string_view term, const SynonymTable& synonyms) { return synonyms.normalize(term); }

/// Maps location terms to coarse classes (thoracic-skeletal, device, ...).
/// A location is classified by the longest key occurring in it as a whole
/// word sequence.
class LocationClasses {
public:
    LocationClasses() = default;

    explicit LocationClasses(const std::map<std::string, std::string>& keys) {
        for (const auto& [k, c] : keys) {
            auto key = detail::canonicalize(k);
            auto cls = detail::canonicalize(c);
            if (key.empty() || cls.empty()) throw Error(ErrorCode::DictionaryInvalid, "empty location class entry");
            m_keys.emplace(key, cls);
            m_classes.insert(cls);
        }
    }

    static LocationClasses from_csv(const csv::Table& table) {
        table.require_columns({"location", "class"});
        std::map<std::string, std::string> keys;
        for (std::size_t r = 0; r < table.size(); ++r) {
            auto key = detail::canonicalize(table.at(r, "location"));
            auto [it, inserted] = keys.emplace(key, table.at(r, "class"));
            if (!inserted) throw Error(ErrorCode::DictionaryInvalid, table.origin() + ": duplicate location '" + key + "'");
        }
        return LocationClasses(keys);
    }

    std::optional<std::string> classify(std::string_view location) const {
        const std::string loc = detail::canonicalize(location);
        const std::string* best_key = nullptr;
        const std::string* best_class = nullptr;
        for (const auto& [key, cls] : m_keys) {
            if (!contains_words(loc, key)) continue;
            if (!best_key || key.size() > best_key->size()) {
                best_key = &key;
                best_class = &cls;
            }
        }
        if (!best_class) return std::nullopt;
        return *best_class;
    }

    bool has_class(const std::string& cls) const { return m_classes.count(cls) != 0; }
    const std::set<std::string>& classes() const { return m_classes; }

private:
    static bool contains_words(const std::string& text, const std::string& key) {
        auto boundary = [&](std::size_t pos) {
            return pos >= text.size() || !std::isalnum(static_cast<unsigned char>(text[pos]));
        };
        std::size_t pos = 0;
        while ((pos = text.find(key, pos)) != std::string::npos) {
            bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
            if (left && boundary(pos + key.size())) return true;
            ++pos;
        }
        return false;
    }

    std::map<std::string, std::string> m_keys;
    std::set<std::string> m_classes;
};

// ---------------------------------------------------------------------------
// Dictionary
// ---------------------------------------------------------------------------

struct DiagnosisStructure {
    std::string diagnosis;
    int variants = 0;
    int pathways = 0;
    int depth = 0;
    int width = 0;
};

class PathwayDictionary {
public:
    PathwayDictionary() = default;

    /// Normalizes every term through `synonyms` and validates the result:
    /// known views and location classes, at least one child per variant, and
    /// no two variants sharing (diagnosis, triggers, view set).
    PathwayDictionary(std::vector<PathwayVariant> variants, SynonymTable synonyms, LocationClasses classes)
        : m_synonyms(std::move(synonyms)), m_classes(std::move(classes)) {
        for (auto& v : variants) m_variants.push_back(normalize_variant(v));
        validate();
        for (std::size_t i = 0; i < m_variants.size(); ++i) m_by_diagnosis[m_variants[i].diagnosis].push_back(i);
    }

    /// Loads the dictionary CSV (diagnosis, variant, views, trigger_attributes,
    /// trigger_location_class, pathway_dsl). The views column must agree with
    /// the view segment of the DSL.
    static PathwayDictionary from_csv(const csv::Table& table, SynonymTable synonyms, LocationClasses classes) {
        table.require_columns(
            {"diagnosis", "variant", "views", "trigger_attributes", "trigger_location_class", "pathway_dsl"});
        std::vector<PathwayVariant> variants;
        for (std::size_t r = 0; r < table.size(); ++r) {
            const std::string where = table.origin() + " row " + std::to_string(r + 2);
            PathwayVariant v;
            try {
                v = parse_pathway(table.at(r, "pathway_dsl"));
            } catch (const Error& e) {
                throw Error(ErrorCode::DictionaryInvalid, where + ": " + e.what());
            }
            v.diagnosis = table.at(r, "diagnosis");
            v.name = table.at(r, "variant");
            std::set<std::string> column_views;
            for (const auto& t : detail::split(table.at(r, "views"), ',')) {
                auto c = detail::canonicalize(t);
                if (!c.empty()) column_views.insert(c);
            }
            if (column_views != v.views) {
                throw Error(ErrorCode::DictionaryInvalid, where + ": views column disagrees with the DSL view segment");
            }
            for (const auto& t : detail::split(table.at(r, "trigger_attributes"), ';')) {
                auto c = detail::canonicalize(t);
                if (!c.empty()) v.trigger_attributes.insert(c);
            }
            auto cls = detail::canonicalize(table.at(r, "trigger_location_class"));
            if (!cls.empty()) v.trigger_location_class = cls;
            variants.push_back(std::move(v));
        }
        return PathwayDictionary(std::move(variants), std::move(synonyms), std::move(classes));
    }

    static PathwayDictionary load(const std::string& dictionary_csv, const std::string& synonyms_csv,
                                  const std::string& location_classes_csv) {
        return from_csv(csv::Table::from_file(dictionary_csv), SynonymTable::from_csv(csv::Table::from_file(synonyms_csv)),
                        LocationClasses::from_csv(csv::Table::from_file(location_classes_csv)));
    }

    const std::vector<PathwayVariant>& variants() const { return m_variants; }
    const SynonymTable& synonyms() const { return m_synonyms; }
    const LocationClasses& location_classes() const { return m_classes; }

    std::vector<std::string> diagnoses() const {
        std::vector<std::string> out;
        for (const auto& [d, _] : m_by_diagnosis) out.push_back(d);
        return out;
    }

    bool is_diagnosis(const std::string& normalized_term) const { return m_by_diagnosis.count(normalized_term) != 0; }

    std::vector<const PathwayVariant*> variants_for(const std::string& diagnosis) const {
        std::vector<const PathwayVariant*> out;
        auto it = m_by_diagnosis.find(diagnosis);
        if (it == m_by_diagnosis.end()) return out;
        for (auto i : it->second) out.push_back(&m_variants[i]);
        return out;
    }

    std::string normalize(std::string_view term) const { return m_synonyms.normalize(term); }

    /// Canonical view string: descriptors resolved through the synonym table
    /// and listed in projection-then-orientation order.
    std::string normalize_view(std::string_view view) const { return views::format(view_tokens(view)); }

    std::set<std::string> view_tokens(std::string_view view) const {
        std::set<std::string> tokens;
        std::string flat(view);
        std::replace(flat.begin(), flat.end(), '/', ',');
        for (const auto& piece : detail::split(flat, ',')) {
            auto whole = m_synonyms.normalize(piece);
            if (whole.empty()) continue;
            if (views::is_descriptor(whole)) {
                tokens.insert(whole);
                continue;
            }
            bool any = false;
            std::vector<std::string> words;
            for (const auto& w : detail::split(detail::canonicalize(piece), ' ')) {
                auto t = m_synonyms.normalize(w);
                if (t.empty()) continue;
                any = any || views::is_descriptor(t);
                words.push_back(std::move(t));
            }
            if (any) {
                tokens.insert(words.begin(), words.end());
            } else {
                tokens.insert(whole);
            }
        }
        return tokens;
    }

    FindingRecord normalize_record(FindingRecord rec) const {
        rec.finding = normalize(rec.finding);
        if (rec.location) {
            auto loc = normalize(*rec.location);
            rec.location = loc.empty() ? std::nullopt : std::optional<std::string>(loc);
        }
        std::set<std::string> attrs;
        for (const auto& a : rec.attributes) {
            auto n = normalize(a);
            if (!n.empty()) attrs.insert(std::move(n));
        }
        rec.attributes = std::move(attrs);
        if (rec.view) {
            auto v = normalize_view(*rec.view);
            rec.view = v.empty() ? std::nullopt : std::optional<std::string>(v);
        }
        return rec;
    }

    /// The single variant compatible with a normalized record, or nullptr when
    /// none or several survive.
    const PathwayVariant* match(const FindingRecord& rec) const {
        auto it = m_by_diagnosis.find(rec.finding);
        if (it == m_by_diagnosis.end()) return nullptr;
        const auto& idx = it->second;

        std::optional<std::string> loc_class;
        if (rec.location) loc_class = m_classes.classify(*rec.location);
        std::optional<std::set<std::string>> record_views;
        if (rec.view) record_views = view_tokens(*rec.view);

        auto loc_ok = [&](const PathwayVariant& v) {
            if (!v.trigger_location_class) return true;
            return loc_class && *loc_class == *v.trigger_location_class;
        };
        auto attr_ok = [&](const PathwayVariant& v) {
            return std::includes(rec.attributes.begin(), rec.attributes.end(), v.trigger_attributes.begin(),
                                 v.trigger_attributes.end());
        };

        // Base variants yield to any triggered sibling that applies.
        bool triggered_applies = false;
        for (auto i : idx) {
            const auto& v = m_variants[i];
            if (!v.trigger_attributes.empty() && loc_ok(v) && attr_ok(v)) triggered_applies = true;
        }
        std::vector<std::size_t> survivors;
        for (auto i : idx) {
            const auto& v = m_variants[i];
            if (!loc_ok(v) || !attr_ok(v)) continue;
            if (v.trigger_attributes.empty() && triggered_applies) continue;
            if (!view_ok(v, record_views)) continue;
            survivors.push_back(i);
        }
        // Generic (orientation-free) variants yield to an orientation-specific
        // sibling with the same triggers.
        std::vector<std::size_t> result;
        for (auto i : survivors) {
            const auto& v = m_variants[i];
            if (!has_orientation(v)) {
                bool shadowed = std::any_of(survivors.begin(), survivors.end(), [&](std::size_t j) {
                    return j != i && has_orientation(m_variants[j]) && same_triggers(v, m_variants[j]);
                });
                if (shadowed) continue;
            }
            result.push_back(i);
        }
        return result.size() == 1 ? &m_variants[result.front()] : nullptr;
    }

    /// Per-diagnosis structure: distinct variant names, distinct pathways,
    /// longest diagnosis chain, and distinct leaf entities reachable.
    std::vector<DiagnosisStructure> structure() const {
        std::vector<DiagnosisStructure> out;
        for (const auto& [diag, idx] : m_by_diagnosis) {
            DiagnosisStructure s;
            s.diagnosis = diag;
            std::set<std::string> names;
            std::set<std::string> pathways;
            for (auto i : idx) {
                names.insert(m_variants[i].name);
                pathways.insert(serialize_pathway(m_variants[i]));
            }
            s.variants = static_cast<int>(names.size());
            s.pathways = static_cast<int>(pathways.size());
            std::vector<std::string> stack;
            s.depth = depth_of(diag, stack);
            s.width = static_cast<int>(leaves_of(diag, stack).size());
            out.push_back(std::move(s));
        }
        return out;
    }

    int max_depth() const {
        int d = 0;
        for (const auto& s : structure()) d = std::max(d, s.depth);
        return d;
    }

private:
    static bool has_orientation(const PathwayVariant& v) {
        return std::any_of(v.views.begin(), v.views.end(), [](const std::string& t) { return views::is_orientation(t); });
    }

    static bool same_triggers(const PathwayVariant& a, const PathwayVariant& b) {
        return a.trigger_attributes == b.trigger_attributes && a.trigger_location_class == b.trigger_location_class;
    }

    static bool has_full_projection_set(const PathwayVariant& v) {
        const auto& p = views::projections();
        return std::all_of(p.begin(), p.end(), [&](const std::string& t) { return v.views.count(t) != 0; });
    }

    static bool view_ok(const PathwayVariant& v, const std::optional<std::set<std::string>>& record_views) {
        if (!record_views) return has_full_projection_set(v) && !has_orientation(v);
        std::set<std::string> rec_proj;
        std::set<std::string> rec_orient;
        for (const auto& t : *record_views) {
            if (views::is_projection(t)) rec_proj.insert(t);
            if (views::is_orientation(t)) rec_orient.insert(t);
        }
        if (rec_proj.empty()) {
            if (!has_full_projection_set(v)) return false;
        } else {
            for (const auto& p : rec_proj) {
                if (!v.views.count(p)) return false;
            }
        }
        if (has_orientation(v)) {
            return std::any_of(rec_orient.begin(), rec_orient.end(), [&](const std::string& o) { return v.views.count(o) != 0; });
        }
        return true;
    }

    PathwayVariant normalize_variant(PathwayVariant v) const {
        v.diagnosis = normalize(v.diagnosis);
        v.name = normalize(v.name);
        std::set<std::string> vs;
        for (const auto& t : v.views) vs.insert(normalize(t));
        v.views = std::move(vs);
        std::set<std::string> trig;
        for (const auto& t : v.trigger_attributes) trig.insert(normalize(t));
        v.trigger_attributes = std::move(trig);
        if (v.trigger_location_class) v.trigger_location_class = detail::canonicalize(*v.trigger_location_class);
        for (auto& n : v.children) {
            n.finding = normalize(n.finding);
            if (n.location) n.location = normalize(*n.location);
            std::set<std::string> attrs;
            for (const auto& a : n.attributes) attrs.insert(normalize(a));
            n.attributes = std::move(attrs);
        }
        return v;
    }

    void validate() const {
        std::set<std::tuple<std::string, std::set<std::string>, std::optional<std::string>, std::set<std::string>>> keys;
        for (const auto& v : m_variants) {
            const std::string label = "'" + v.name + "' (" + v.diagnosis + ")";
            if (v.diagnosis.empty() || v.name.empty()) {
                throw Error(ErrorCode::DictionaryInvalid, "variant without diagnosis or name");
            }
            if (v.children.empty()) throw Error(ErrorCode::DictionaryInvalid, label + " has no pathway nodes");
            if (v.views.empty()) throw Error(ErrorCode::DictionaryInvalid, label + " has no view segment");
            for (const auto& t : v.views) {
                if (!views::is_descriptor(t)) throw Error(ErrorCode::DictionaryInvalid, label + ": unknown view '" + t + "'");
            }
            if (!std::any_of(v.views.begin(), v.views.end(), [](const std::string& t) { return views::is_projection(t); })) {
                throw Error(ErrorCode::DictionaryInvalid, label + ": view set names no projection");
            }
            if (v.trigger_location_class && !m_classes.has_class(*v.trigger_location_class)) {
                throw Error(ErrorCode::DictionaryInvalid,
                            label + ": unknown location class '" + *v.trigger_location_class + "'");
            }
            if (!keys.emplace(v.diagnosis, v.trigger_attributes, v.trigger_location_class, v.views).second) {
                throw Error(ErrorCode::DictionaryInvalid,
                            label + " duplicates another variant's triggers and view set");
            }
        }
    }

    int depth_of(const std::string& diag, std::vector<std::string>& stack) const {
        if (std::find(stack.begin(), stack.end(), diag) != stack.end()) {
            throw Error(ErrorCode::CycleDetected, "pathway cycle through '" + diag + "'");
        }
        stack.push_back(diag);
        int best = 0;
        for (auto i : m_by_diagnosis.at(diag)) {
            int d = 1;
            for (const auto& n : m_variants[i].children) {
                if (n.status == Status::dp && is_diagnosis(n.finding)) d = std::max(d, 1 + depth_of(n.finding, stack));
            }
            best = std::max(best, d);
        }
        stack.pop_back();
        return best;
    }

    std::set<std::string> leaves_of(const std::string& diag, std::vector<std::string>& stack) const {
        if (std::find(stack.begin(), stack.end(), diag) != stack.end()) {
            throw Error(ErrorCode::CycleDetected, "pathway cycle through '" + diag + "'");
        }
        stack.push_back(diag);
        std::set<std::string> out;
        for (auto i : m_by_diagnosis.at(diag)) {
            for (const auto& n : m_variants[i].children) {
                if (n.status == Status::dp && is_diagnosis(n.finding)) {
                    auto sub = leaves_of(n.finding, stack);
                    out.insert(sub.begin(), sub.end());
                } else {
                    out.insert(n.finding);
                }
            }
        }
        stack.pop_back();
        return out;
    }

    std::vector<PathwayVariant> m_variants;
    SynonymTable m_synonyms;
    LocationClasses m_classes;
    std::map<std::string, std::vector<std::size_t>> m_by_diagnosis;
};

} // namespace radunc
