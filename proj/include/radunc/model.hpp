#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radunc/error.hpp"

namespace radunc {

// ---------------------------------------------------------------------------
// Status
// ---------------------------------------------------------------------------

/// Finding status: polarity (positive/negative) crossed with certainty
/// (definitive/tentative). Enumerator values encode resolution priority,
/// so `dp > tp > tn > dn` holds under the built-in comparison.
enum class Status : std::uint8_t { dn = 0, tn = 1, tp = 2, dp = 3 };

inline constexpr Status kAllStatuses[] = {Status::dp, Status::tp, Status::tn, Status::dn};

constexpr int priority(Status s) { return static_cast<int>(s); }

constexpr bool is_positive(Status s) { return s == Status::dp || s == Status::tp; }
constexpr bool is_negative(Status s) { return !is_positive(s); }
constexpr bool is_tentative(Status s) { return s == Status::tp || s == Status::tn; }
constexpr bool is_definitive(Status s) { return !is_tentative(s); }

constexpr std::string_view to_string(Status s) {
    switch (s) {
    case Status::dp: return "dp";
    case Status::tp: return "tp";
    case Status::tn: return "tn";
    case Status::dn: return "dn";
    }
    return "?";
}

inline std::optional<Status> parse_status(std::string_view text) {
    if (text == "dp") return Status::dp;
    if (text == "tp") return Status::tp;
    if (text == "tn") return Status::tn;
    if (text == "dn") return Status::dn;
    return std::nullopt;
}

enum class Source : std::uint8_t { original, expansion };

constexpr std::string_view to_string(Source s) {
    return s == Source::original ? "original" : "expansion";
}

inline std::optional<Source> parse_source(std::string_view text) {
    if (text == "original") return Source::original;
    if (text == "expansion") return Source::expansion;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// FindingRecord
// ---------------------------------------------------------------------------

/// One structured finding of a report. Definitive findings usually carry no
/// stored probability; `presence_probability` supplies the implicit 1.0/0.0.
struct FindingRecord {
    std::string study_id;
    std::string finding;
    std::optional<std::string> location;
    std::set<std::string> attributes;
    std::optional<std::string> view;
    Status status = Status::dp;
    std::optional<double> prob;
    Source source = Source::original;
    std::optional<std::string> sentence;

    friend bool operator==(const FindingRecord&, const FindingRecord&) = default;
};

/// Stored probability, or the implicit value of a definitive status.
inline double presence_probability(const FindingRecord& rec) {
    if (rec.prob) return *rec.prob;
    return rec.status == Status::dp ? 1.0 : 0.0;
}

inline void validate_record(const FindingRecord& rec) {
    if (rec.prob) {
        double p = *rec.prob;
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::InvalidProbability,
                        "prob " + std::to_string(p) + " outside [0,1] for '" + rec.finding + "'");
        }
        if (rec.status == Status::dp && p != 1.0) {
            throw Error(ErrorCode::InvalidProbability, "dp finding '" + rec.finding + "' must have prob 1.0 or none");
        }
        if (rec.status == Status::dn && p != 0.0) {
            throw Error(ErrorCode::InvalidProbability, "dn finding '" + rec.finding + "' must have prob 0.0 or none");
        }
    } else if (is_tentative(rec.status)) {
        throw Error(ErrorCode::MissingProbability,
                    "tentative finding '" + rec.finding + "' has no probability");
    }
    if (rec.source == Source::expansion && rec.sentence) {
        throw Error(ErrorCode::SentenceOnExpansion, "expansion record '" + rec.finding + "' carries a sentence");
    }
}

// ---------------------------------------------------------------------------
// Ratings and comparisons
// ---------------------------------------------------------------------------

/// Gaussian skill belief.
struct Rating {
    double mu = 25.0;
    double sigma = 25.0 / 3.0;

    friend bool operator==(const Rating&, const Rating&) = default;
};

enum class Winner : std::uint8_t { A, B };

constexpr std::string_view to_string(Winner w) { return w == Winner::A ? "A" : "B"; }

inline std::optional<Winner> parse_winner(std::string_view text) {
    if (text == "A") return Winner::A;
    if (text == "B") return Winner::B;
    return std::nullopt;
}

constexpr Winner flip(Winner w) { return w == Winner::A ? Winner::B : Winner::A; }

/// One logged pairwise judgment. `winner` names the item whose sentence
/// conveys greater certainty that the finding is present.
struct ComparisonRecord {
    std::string item_a;
    std::string item_b;
    std::string sentence_a;
    std::string sentence_b;
    std::string judge;
    Winner winner = Winner::A;

    const std::string& winner_item() const { return winner == Winner::A ? item_a : item_b; }
    const std::string& loser_item() const { return winner == Winner::A ? item_b : item_a; }

    friend bool operator==(const ComparisonRecord&, const ComparisonRecord&) = default;
};

struct Occurrence {
    std::string finding;
    std::string sentence;

    friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct HedgingPhrase {
    std::string text;
    std::vector<Occurrence> occurrences;

    std::size_t count() const { return occurrences.size(); }
};

} // namespace radunc
