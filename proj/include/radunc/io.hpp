#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "radunc/csv.hpp"
#include "radunc/detail/hash.hpp"
#include "radunc/detail/strings.hpp"
#include "radunc/error.hpp"
#include "radunc/metrics.hpp"
#include "radunc/model.hpp"
#include "radunc/ranking.hpp"

namespace radunc::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

inline std::vector<json> parse_jsonl(const std::string& text, const std::string& origin) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

inline std::string required_string(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
        throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a string");
    }
    return j.at(key).get<std::string>();
}

inline std::vector<Extraction> parse_extractions(const std::string& text, const std::string& origin = "<memory>") {
    std::vector<Extraction> out;
    std::size_t n = 0;
    for (const auto& j : parse_jsonl(text, origin)) {
        const std::string where = origin + " record " + std::to_string(++n);
        out.push_back({required_string(j, "phrase", where), required_string(j, "finding", where),
                       required_string(j, "sentence", where)});
    }
    return out;
}

inline std::vector<ComparisonRecord> parse_comparisons(const std::string& text, const std::string& origin = "<memory>") {
    std::vector<ComparisonRecord> out;
    std::size_t n = 0;
    for (const auto& j : parse_jsonl(text, origin)) {
        const std::string where = origin + " record " + std::to_string(++n);
        ComparisonRecord rec;
        rec.item_a = required_string(j, "item_a", where);
        rec.item_b = required_string(j, "item_b", where);
        rec.sentence_a = required_string(j, "sentence_a", where);
        rec.sentence_b = required_string(j, "sentence_b", where);
        rec.judge = required_string(j, "judge", where);
        auto w = parse_winner(required_string(j, "winner", where));
        if (!w) throw Error(ErrorCode::ParseError, where + ": winner must be \"A\" or \"B\"");
        rec.winner = *w;
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::string format_comparisons(const std::vector<ComparisonRecord>& log) {
    std::string out;
    for (const auto& r : log) {
        json j{{"item_a", r.item_a},         {"item_b", r.item_b}, {"sentence_a", r.sentence_a},
               {"sentence_b", r.sentence_b}, {"judge", r.judge},   {"winner", std::string(to_string(r.winner))}};
        out += j.dump() + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

inline std::string format_vocabulary_csv(const Vocabulary& vocab) {
    std::vector<csv::Row> rows;
    for (const auto& p : vocab.phrases) rows.push_back({p.text, std::to_string(p.count())});
    return csv::format({"phrase", "count"}, rows);
}

inline std::string format_occurrences_jsonl(const Vocabulary& vocab) {
    std::string out;
    for (const auto& p : vocab.phrases) {
        for (const auto& o : p.occurrences) {
            out += json{{"phrase", p.text}, {"finding", o.finding}, {"sentence", o.sentence}}.dump() + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

inline std::string format_ranking_csv(const ReferenceRanking& ranking) {
    std::vector<csv::Row> rows;
    for (const auto& e : ranking.entries) {
        rows.push_back({e.phrase, detail::format_double(e.rating.mu), detail::format_double(e.rating.sigma),
                        std::to_string(e.rank)});
    }
    return csv::format({"phrase", "mu", "sigma", "rank"}, rows);
}

inline std::string format_seed_ratings_csv(const ReferenceRanking& ranking) {
    std::vector<csv::Row> rows;
    for (const auto& run : ranking.per_seed) {
        for (const auto& [phrase, r] : run.ratings) {
            rows.push_back({std::to_string(run.seed), phrase, detail::format_double(r.mu), detail::format_double(r.sigma)});
        }
    }
    return csv::format({"seed", "phrase", "mu", "sigma"}, rows);
}

inline std::string format_sentences_jsonl(const ReferenceRanking& ranking) {
    std::string out;
    for (const auto& [phrase, sentences] : ranking.sentences) {
        out += json{{"phrase", phrase}, {"sentences", sentences}}.dump() + "\n";
    }
    return out;
}

/// Reads ranking.csv; entries are re-sorted and re-ranked from mu.
inline ReferenceRanking parse_ranking_csv(const csv::Table& table) {
    table.require_columns({"phrase", "mu", "sigma"});
    ReferenceRanking ranking;
    for (std::size_t r = 0; r < table.size(); ++r) {
        auto mu = detail::parse_double(table.at(r, "mu"));
        auto sigma = detail::parse_double(table.at(r, "sigma"));
        if (!mu || !sigma) {
            throw Error(ErrorCode::ParseError, table.origin() + " row " + std::to_string(r + 2) + ": bad mu/sigma");
        }
        ranking.entries.push_back({table.at(r, "phrase"), {*mu, *sigma}, 0});
    }
    ranking.reorder();
    return ranking;
}

inline void attach_sentences(ReferenceRanking& ranking, const std::string& jsonl, const std::string& origin) {
    std::size_t n = 0;
    for (const auto& j : parse_jsonl(jsonl, origin)) {
        const std::string where = origin + " record " + std::to_string(++n);
        auto phrase = required_string(j, "phrase", where);
        if (!j.contains("sentences") || !j.at("sentences").is_array()) {
            throw Error(ErrorCode::ParseError, where + ": 'sentences' must be an array");
        }
        ranking.sentences[phrase] = j.at("sentences").get<std::vector<std::string>>();
    }
}

// ---------------------------------------------------------------------------
// Finding datasets
// ---------------------------------------------------------------------------

inline const csv::Row& dataset_header() {
    static const csv::Row h{"study_id", "finding", "location", "attributes", "view",
                            "status",   "prob",    "source",   "sentence"};
    return h;
}

inline csv::Row to_row(const FindingRecord& r) {
    return {r.study_id,
            r.finding,
            r.location.value_or(""),
            detail::join(r.attributes, ";"),
            r.view.value_or(""),
            std::string(to_string(r.status)),
            r.prob ? detail::format_double(*r.prob) : "",
            std::string(to_string(r.source)),
            r.sentence.value_or("")};
}

inline std::string format_dataset_csv(const std::vector<FindingRecord>& records) {
    std::vector<csv::Row> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_row(r));
    return csv::format(dataset_header(), rows);
}

/// Parses the dataset CSV. `location`, `attributes`, `view`, `prob`,
/// `source` and `sentence` columns are optional; empty cells mean absent.
inline std::vector<FindingRecord> parse_dataset(const csv::Table& table) {
    table.require_columns({"study_id", "finding", "status"});
    auto cell = [&](std::size_t r, const char* col) -> std::string {
        return table.has_column(col) ? table.at(r, col) : std::string();
    };
    auto opt = [](std::string s) -> std::optional<std::string> {
        if (detail::trim(s).empty()) return std::nullopt;
        return std::string(detail::trim(s));
    };
    std::vector<FindingRecord> out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const std::string where = table.origin() + " row " + std::to_string(r + 2);
        FindingRecord rec;
        rec.study_id = std::string(detail::trim(table.at(r, "study_id")));
        rec.finding = std::string(detail::trim(table.at(r, "finding")));
        if (rec.study_id.empty() || rec.finding.empty()) {
            throw Error(ErrorCode::ParseError, where + ": study_id and finding are required");
        }
        rec.location = opt(cell(r, "location"));
        for (const auto& a : detail::split(cell(r, "attributes"), ';')) {
            auto t = detail::trim(a);
            if (!t.empty()) rec.attributes.insert(std::string(t));
        }
        rec.view = opt(cell(r, "view"));
        auto st = parse_status(detail::trim(table.at(r, "status")));
        if (!st) throw Error(ErrorCode::ParseError, where + ": status must be dp, tp, tn or dn");
        rec.status = *st;
        if (auto p = opt(cell(r, "prob"))) {
            auto v = detail::parse_double(*p);
            if (!v) throw Error(ErrorCode::ParseError, where + ": prob '" + *p + "' is not a number");
            rec.prob = *v;
        }
        if (auto s = opt(cell(r, "source"))) {
            auto src = parse_source(*s);
            if (!src) throw Error(ErrorCode::ParseError, where + ": source must be original or expansion");
            rec.source = *src;
        }
        auto sentence = cell(r, "sentence");
        if (!detail::trim(sentence).empty()) rec.sentence = sentence;
        out.push_back(std::move(rec));
    }
    return out;
}

/// Stable identifier of a finding-sentence pair: study|finding|fnv1a(sentence).
inline std::string sentence_hash(const std::string& sentence) {
    static const char* hex = "0123456789abcdef";
    std::uint64_t h = detail::fnv1a(sentence);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Other tables
// ---------------------------------------------------------------------------

/// phrase,skill table for synthetic judges.
inline std::map<std::string, double> parse_latent(const csv::Table& table) {
    table.require_columns({"item", "skill"});
    std::map<std::string, double> out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        auto v = detail::parse_double(table.at(r, "skill"));
        if (!v) throw Error(ErrorCode::ParseError, table.origin() + " row " + std::to_string(r + 2) + ": bad skill");
        out[table.at(r, "item")] = *v;
    }
    return out;
}

/// First column names the item; every further column is a rater with cells
/// A, B or empty.
inline DecisionMatrix parse_decision_matrix(const csv::Table& table) {
    const auto& header = table.header();
    if (header.size() < 2) throw Error(ErrorCode::ParseError, table.origin() + ": need an item column and raters");
    std::vector<std::string> items;
    for (std::size_t r = 0; r < table.size(); ++r) items.push_back(table.row(r)[0]);
    DecisionMatrix m(items, std::vector<std::string>(header.begin() + 1, header.end()));
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            auto cell = detail::trim(table.row(r)[c]);
            if (cell.empty()) continue;
            auto w = parse_winner(cell);
            if (!w) throw Error(ErrorCode::ParseError, table.origin() + ": cell '" + std::string(cell) + "' is not A/B");
            m.set(r, c - 1, *w);
        }
    }
    return m;
}

} // namespace radunc::io
