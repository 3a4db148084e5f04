#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "radunc/detail/hash.hpp"
#include "radunc/detail/strings.hpp"
#include "radunc/error.hpp"
#include "radunc/model.hpp"
#include "radunc/pathway.hpp"

namespace radunc {

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
};

/// Binary hashed bag of lowercase alphanumeric tokens, L2-normalized. Cosine
/// similarity between two such vectors is the token-set overlap
/// |A ∩ B| / sqrt(|A| |B|), up to hash collisions.
class LexicalEmbedding final : public EmbeddingProvider {
public:
    explicit LexicalEmbedding(std::size_t dimension = 1024) : m_dim(dimension) {
        if (m_dim == 0) throw Error(ErrorCode::InvalidConfig, "embedding dimension must be > 0");
    }

    std::vector<double> embed(std::string_view text) const override {
        std::vector<double> v(m_dim, 0.0);
        std::string token;
        auto flush = [&] {
            if (!token.empty()) v[detail::fnv1a(token) % m_dim] = 1.0;
            token.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                token.push_back(static_cast<char>(std::tolower(c)));
            } else {
                flush();
            }
        }
        flush();
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
        }
        return v;
    }

    std::size_t dimension() const override { return m_dim; }

private:
    std::size_t m_dim;
};

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::ProviderFailure, "embedding lengths differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

// ---------------------------------------------------------------------------
// Deduplication
// ---------------------------------------------------------------------------

/// Substring pair that blocks a merge when each side carries a different one.
struct BlacklistRule {
    std::string term_a;
    std::string term_b;
    std::string category;

    /// True when one phrase contains a but not b and the other contains b but
    /// not a, in either orientation.
    bool blocks(std::string_view x, std::string_view y) const {
        auto has = [](std::string_view s, std::string_view t) { return detail::contains(s, t); };
        auto one_way = [&](std::string_view p, std::string_view q, std::string_view a, std::string_view b) {
            return has(p, a) && !has(p, b) && has(q, b) && !has(q, a);
        };
        return one_way(x, y, term_a, term_b) || one_way(x, y, term_b, term_a);
    }
};

inline std::vector<BlacklistRule> blacklist_from_csv(const csv::Table& table) {
    table.require_columns({"term_a", "term_b", "category"});
    std::vector<BlacklistRule> rules;
    for (std::size_t r = 0; r < table.size(); ++r) {
        rules.push_back({detail::canonicalize(table.at(r, "term_a")), detail::canonicalize(table.at(r, "term_b")),
                         table.at(r, "category")});
    }
    return rules;
}

/// "finding, location, attr1, attr2, ..." with attributes in sorted order.
inline std::string linearize(const FindingRecord& rec) {
    std::vector<std::string> parts{rec.finding};
    if (rec.location) parts.push_back(*rec.location);
    parts.insert(parts.end(), rec.attributes.begin(), rec.attributes.end());
    return detail::join(parts, ", ");
}

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : m_parent(n) { std::iota(m_parent.begin(), m_parent.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (m_parent[x] != x) {
            m_parent[x] = m_parent[m_parent[x]];
            x = m_parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        m_parent[b] = a;
    }

private:
    std::vector<std::size_t> m_parent;
};

} // namespace detail

/// Merges near-duplicate original records within each study. Two records
/// qualify when their linearizations reach `threshold` cosine similarity,
/// share a status, and no blacklist rule separates them. Qualifying pairs are
/// closed transitively; each cluster collapses to the member with the
/// lexicographically first linearization, placed at the cluster's earliest
/// position and carrying the cluster's highest probability. Expansion-source
/// records pass through untouched.
inline std::vector<FindingRecord> deduplicate(const std::vector<FindingRecord>& records,
                                              const EmbeddingProvider& provider, double threshold,
                                              const std::vector<BlacklistRule>& blacklist) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "dedup threshold must lie in (0, 1]");
    }
    const std::size_t n = records.size();
    std::vector<std::string> lin(n);
    std::vector<std::vector<double>> emb(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].source != Source::original) continue;
        lin[i] = linearize(records[i]);
        try {
            emb[i] = provider.embed(lin[i]);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ProviderFailure, e.what());
        }
        if (emb[i].size() != provider.dimension()) {
            throw Error(ErrorCode::ProviderFailure, "provider returned a vector of length " +
                                                        std::to_string(emb[i].size()) + ", expected " +
                                                        std::to_string(provider.dimension()));
        }
    }

    std::map<std::string, std::vector<std::size_t>> by_study;
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].source == Source::original) by_study[records[i].study_id].push_back(i);
    }

    detail::UnionFind uf(n);
    for (const auto& [_, idx] : by_study) {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const auto i = idx[a];
                const auto j = idx[b];
                if (records[i].status != records[j].status) continue;
                if (cosine_similarity(emb[i], emb[j]) < threshold) continue;
                bool blocked = std::any_of(blacklist.begin(), blacklist.end(),
                                           [&](const BlacklistRule& r) { return r.blocks(lin[i], lin[j]); });
                if (!blocked) uf.unite(i, j);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> clusters;  // root (= earliest index) -> members
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].source == Source::original) clusters[uf.find(i)].push_back(i);
    }

    std::vector<FindingRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (records[i].source != Source::original) {
            out.push_back(records[i]);
            continue;
        }
        auto it = clusters.find(i);
        if (it == clusters.end()) continue;  // merged into an earlier record
        const auto& members = it->second;
        std::size_t canon = members.front();
        for (auto m : members) {
            if (lin[m] < lin[canon]) canon = m;
        }
        FindingRecord merged = records[canon];
        if (members.size() > 1) {
            std::optional<double> best;
            for (auto m : members) {
                if (records[m].prob && (!best || *records[m].prob > *best)) best = records[m].prob;
            }
            merged.prob = best;
        }
        out.push_back(std::move(merged));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

/// An expansion record with its position in the expansion tree.
struct ExpandedRecord {
    FindingRecord record;
    std::string root_diagnosis;
    std::string parent;
    int depth = 1;
};

namespace detail {

inline FindingRecord child_record(const FindingRecord& parent, const PathwayNode& node) {
    FindingRecord child;
    child.study_id = parent.study_id;
    child.finding = node.finding;
    child.location = node.location ? node.location : parent.location;
    child.attributes = parent.attributes;
    child.attributes.insert(node.attributes.begin(), node.attributes.end());
    child.view = parent.view;
    child.source = Source::expansion;
    if (node.status == Status::dp) {
        child.status = parent.status;
        child.prob = parent.prob;
    } else {
        // Evidence the pathway expects to be absent: definitive parents give a
        // definitive negative, tentative parents a tentative negative with the
        // complementary probability.
        child.status = parent.status == Status::dp ? Status::dn : Status::tn;
        if (parent.prob) child.prob = 1.0 - *parent.prob;
    }
    return child;
}

inline void expand_into(const FindingRecord& rec, const PathwayVariant& variant, const PathwayDictionary& dict,
                        const std::string& root, int depth, std::vector<const PathwayVariant*>& stack,
                        std::vector<ExpandedRecord>& out) {
    if (std::find(stack.begin(), stack.end(), &variant) != stack.end()) {
        throw Error(ErrorCode::CycleDetected, "pathway cycle through variant '" + variant.name + "'");
    }
    stack.push_back(&variant);
    for (const auto& node : variant.children) {
        FindingRecord child = child_record(rec, node);
        out.push_back({child, root, rec.finding, depth});
        if (is_positive(child.status) && dict.is_diagnosis(child.finding)) {
            if (const PathwayVariant* sub = dict.match(child)) {
                expand_into(child, *sub, dict, root, depth + 1, stack, out);
            }
        }
    }
    stack.pop_back();
}

} // namespace detail

/// Expansion records implied by a positive record matched to `variant`, in
/// depth-first pre-order. Negative records expand to nothing.
inline std::vector<ExpandedRecord> expand_finding_traced(const FindingRecord& rec, const PathwayVariant& variant,
                                                         const PathwayDictionary& dict) {
    std::vector<ExpandedRecord> out;
    if (!is_positive(rec.status)) return out;
    std::vector<const PathwayVariant*> stack;
    detail::expand_into(rec, variant, dict, variant.diagnosis, 1, stack, out);
    return out;
}

inline std::vector<FindingRecord> expand_finding(const FindingRecord& rec, const PathwayVariant& variant,
                                                 const PathwayDictionary& dict) {
    std::vector<FindingRecord> out;
    for (auto& e : expand_finding_traced(rec, variant, dict)) out.push_back(std::move(e.record));
    return out;
}

// ---------------------------------------------------------------------------
// Conflicts
// ---------------------------------------------------------------------------

enum class ConflictSource { original_vs_expansion, original_vs_original, expansion_vs_expansion };
enum class ConflictType { polarity, certainty_pos, certainty_neg, duplicate_pos, duplicate_neg };

inline constexpr ConflictSource kAllConflictSources[] = {
    ConflictSource::expansion_vs_expansion, ConflictSource::original_vs_expansion, ConflictSource::original_vs_original};
inline constexpr ConflictType kAllConflictTypes[] = {ConflictType::certainty_neg, ConflictType::certainty_pos,
                                                     ConflictType::duplicate_neg, ConflictType::duplicate_pos,
                                                     ConflictType::polarity};

constexpr std::string_view to_string(ConflictSource s) {
    switch (s) {
    case ConflictSource::original_vs_expansion: return "original_vs_expansion";
    case ConflictSource::original_vs_original: return "original_vs_original";
    case ConflictSource::expansion_vs_expansion: return "expansion_vs_expansion";
    }
    return "?";
}

constexpr std::string_view to_string(ConflictType t) {
    switch (t) {
    case ConflictType::polarity: return "polarity";
    case ConflictType::certainty_pos: return "certainty_pos";
    case ConflictType::certainty_neg: return "certainty_neg";
    case ConflictType::duplicate_pos: return "duplicate_pos";
    case ConflictType::duplicate_neg: return "duplicate_neg";
    }
    return "?";
}

struct ConflictKey {
    std::string study_id;
    std::string finding;
    std::optional<std::string> location;

    friend auto operator<=>(const ConflictKey&, const ConflictKey&) = default;
};

inline ConflictKey conflict_key(const FindingRecord& rec) {
    ConflictKey k{rec.study_id, detail::canonicalize(rec.finding), std::nullopt};
    if (rec.location) k.location = detail::canonicalize(*rec.location);
    return k;
}

struct Conflict {
    ConflictKey key;
    ConflictSource source = ConflictSource::original_vs_original;
    ConflictType type = ConflictType::polarity;
    std::vector<std::size_t> members;  // indices into the input list
};

/// Mixed polarity is a polarity conflict; a single polarity with both
/// certainty levels is a certainty conflict; a single repeated status is a
/// duplicate.
inline ConflictType classify_statuses(const std::set<Status>& statuses) {
    bool pos = std::any_of(statuses.begin(), statuses.end(), [](Status s) { return is_positive(s); });
    bool neg = std::any_of(statuses.begin(), statuses.end(), [](Status s) { return is_negative(s); });
    if (pos && neg) return ConflictType::polarity;
    if (pos) return statuses.size() > 1 ? ConflictType::certainty_pos : ConflictType::duplicate_pos;
    return statuses.size() > 1 ? ConflictType::certainty_neg : ConflictType::duplicate_neg;
}

namespace detail {

/// Groups of record indices per conflict key, in order of first appearance.
inline std::vector<std::pair<ConflictKey, std::vector<std::size_t>>> group_by_key(const std::vector<FindingRecord>& records) {
    std::map<ConflictKey, std::size_t> slot;
    std::vector<std::pair<ConflictKey, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto key = conflict_key(records[i]);
        auto [it, inserted] = slot.emplace(key, groups.size());
        if (inserted) groups.push_back({std::move(key), {}});
        groups[it->second].second.push_back(i);
    }
    return groups;
}

} // namespace detail

inline std::vector<Conflict> detect_conflicts(const std::vector<FindingRecord>& records) {
    std::vector<Conflict> out;
    for (auto& [key, members] : detail::group_by_key(records)) {
        if (members.size() < 2) continue;
        bool has_orig = false;
        bool has_exp = false;
        std::set<Status> statuses;
        for (auto i : members) {
            (records[i].source == Source::original ? has_orig : has_exp) = true;
            statuses.insert(records[i].status);
        }
        Conflict c;
        c.key = key;
        c.source = has_orig && has_exp ? ConflictSource::original_vs_expansion
                   : has_orig          ? ConflictSource::original_vs_original
                                       : ConflictSource::expansion_vs_expansion;
        c.type = classify_statuses(statuses);
        c.members = members;
        out.push_back(std::move(c));
    }
    return out;
}

/// Which records survive resolution: at most one per (study, finding,
/// location). For each group, originals win over expansions; among what
/// remains a pure dp/dn clash removes everything, otherwise the highest
/// presence probability survives (ties: dp > tp > tn > dn, then earliest).
inline std::vector<bool> resolution_mask(const std::vector<FindingRecord>& records) {
    std::vector<bool> keep(records.size(), false);
    for (const auto& [_, members] : detail::group_by_key(records)) {
        if (members.size() == 1) {
            keep[members.front()] = true;
            continue;
        }
        std::vector<std::size_t> remaining;
        for (auto i : members) {
            if (records[i].source == Source::original) remaining.push_back(i);
        }
        if (remaining.empty()) remaining = members;
        if (remaining.size() == 1) {
            keep[remaining.front()] = true;
            continue;
        }
        std::set<Status> statuses;
        for (auto i : remaining) statuses.insert(records[i].status);
        if (statuses == std::set<Status>{Status::dp, Status::dn}) continue;
        std::size_t best = remaining.front();
        for (auto i : remaining) {
            double p = presence_probability(records[i]);
            double q = presence_probability(records[best]);
            if (p > q || (p == q && priority(records[i].status) > priority(records[best].status))) best = i;
        }
        keep[best] = true;
    }
    return keep;
}

/// Applies resolution_mask, preserving input order.
inline std::vector<FindingRecord> resolve_conflicts(const std::vector<FindingRecord>& records) {
    const auto keep = resolution_mask(records);
    std::vector<FindingRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) out.push_back(records[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct ExpansionConfig {
    double dedup_threshold = 0.9;
};

/// Every intermediate of one pipeline run. `root` vectors run parallel to
/// their record vectors and name the diagnosis an expansion row descends from
/// (empty for originals).
struct ExpansionRun {
    std::vector<FindingRecord> before;
    std::vector<FindingRecord> deduplicated;
    std::vector<std::string> matched_diagnosis;  // parallel to deduplicated; empty when unmatched
    std::vector<ExpandedRecord> expanded;
    std::vector<FindingRecord> combined;
    std::vector<std::string> combined_root;
    std::vector<Conflict> conflicts;
    std::vector<FindingRecord> after;
    std::vector<std::string> after_root;
};

/// normalize → validate → deduplicate → match → expand → detect → resolve.
/// Only original positive records are expanded; each record's expansions
/// follow it directly in the combined list.
inline ExpansionRun run_expansion(const std::vector<FindingRecord>& input, const PathwayDictionary& dict,
                                  const EmbeddingProvider& provider, const std::vector<BlacklistRule>& blacklist,
                                  const ExpansionConfig& cfg = {}) {
    ExpansionRun run;
    run.before = input;
    std::vector<FindingRecord> normalized;
    normalized.reserve(input.size());
    for (const auto& rec : input) {
        validate_record(rec);
        normalized.push_back(dict.normalize_record(rec));
    }
    run.deduplicated = deduplicate(normalized, provider, cfg.dedup_threshold, blacklist);

    for (const auto& rec : run.deduplicated) {
        run.combined.push_back(rec);
        run.combined_root.emplace_back();
        std::string matched;
        if (rec.source == Source::original && is_positive(rec.status)) {
            if (const PathwayVariant* v = dict.match(rec)) {
                matched = v->diagnosis;
                for (auto& e : expand_finding_traced(rec, *v, dict)) {
                    run.combined.push_back(e.record);
                    run.combined_root.push_back(e.root_diagnosis);
                    run.expanded.push_back(std::move(e));
                }
            }
        }
        run.matched_diagnosis.push_back(std::move(matched));
    }

    run.conflicts = detect_conflicts(run.combined);
    const auto keep = resolution_mask(run.combined);
    for (std::size_t i = 0; i < run.combined.size(); ++i) {
        if (!keep[i]) continue;
        run.after.push_back(run.combined[i]);
        run.after_root.push_back(run.combined_root[i]);
    }
    return run;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct DiagnosisCoverage {
    DiagnosisStructure structure;
    int expandable = 0;
    double expandable_pct = 0.0;
    int inferred = 0;
    double inferred_pct = 0.0;
};

struct CoverageStats {
    std::vector<DiagnosisCoverage> diagnoses;
    int total_variants = 0;
    int total_pathways = 0;
    double avg_depth = 0.0;
    double avg_width = 0.0;
    int total_expandable = 0;
    double total_expandable_pct = 0.0;
    int total_inferred = 0;
    double total_inferred_pct = 0.0;

    int original_rows = 0;   // original records in the input
    int rows_before = 0;     // input rows
    int rows_expanded = 0;   // rows after dedup plus expansions
    int rows_after = 0;      // rows after resolution
    int removals = 0;        // rows_expanded - rows_after
    std::map<std::pair<ConflictType, ConflictSource>, int> conflicts;
    int total_conflicts = 0;
};

/// Percentages are relative to the number of original input records.
inline CoverageStats coverage_stats(const ExpansionRun& run, const PathwayDictionary& dict) {
    CoverageStats s;
    s.rows_before = static_cast<int>(run.before.size());
    for (const auto& r : run.before) s.original_rows += r.source == Source::original ? 1 : 0;
    s.rows_expanded = static_cast<int>(run.combined.size());
    s.rows_after = static_cast<int>(run.after.size());
    s.removals = s.rows_expanded - s.rows_after;

    std::map<std::string, int> expandable;
    for (const auto& d : run.matched_diagnosis) {
        if (!d.empty()) ++expandable[d];
    }
    std::map<std::string, int> inferred;
    for (std::size_t i = 0; i < run.after.size(); ++i) {
        if (run.after[i].source == Source::expansion && !run.after_root[i].empty()) ++inferred[run.after_root[i]];
    }

    auto pct = [&](int count) { return s.original_rows == 0 ? 0.0 : 100.0 * count / s.original_rows; };
    double depth_sum = 0.0;
    double width_sum = 0.0;
    for (const auto& st : dict.structure()) {
        DiagnosisCoverage c;
        c.structure = st;
        c.expandable = expandable.count(st.diagnosis) ? expandable.at(st.diagnosis) : 0;
        c.inferred = inferred.count(st.diagnosis) ? inferred.at(st.diagnosis) : 0;
        c.expandable_pct = pct(c.expandable);
        c.inferred_pct = pct(c.inferred);
        s.total_variants += st.variants;
        s.total_pathways += st.pathways;
        depth_sum += st.depth;
        width_sum += st.width;
        s.total_expandable += c.expandable;
        s.total_inferred += c.inferred;
        s.diagnoses.push_back(std::move(c));
    }
    if (!s.diagnoses.empty()) {
        s.avg_depth = depth_sum / static_cast<double>(s.diagnoses.size());
        s.avg_width = width_sum / static_cast<double>(s.diagnoses.size());
    }
    s.total_expandable_pct = pct(s.total_expandable);
    s.total_inferred_pct = pct(s.total_inferred);

    for (auto t : kAllConflictTypes) {
        for (auto src : kAllConflictSources) s.conflicts[{t, src}] = 0;
    }
    for (const auto& c : run.conflicts) ++s.conflicts[{c.type, c.source}];
    s.total_conflicts = static_cast<int>(run.conflicts.size());
    return s;
}

} // namespace radunc
