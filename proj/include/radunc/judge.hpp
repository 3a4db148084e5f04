#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "radunc/detail/hash.hpp"
#include "radunc/error.hpp"
#include "radunc/model.hpp"

namespace radunc {

struct JudgeOutcome {
    Winner winner = Winner::A;
    std::string judge;

    friend bool operator==(const JudgeOutcome&, const JudgeOutcome&) = default;
};

/// One pairwise question put to a judge. `repetition` counts earlier
/// comparisons of the same pair by the same judge (replay key); `nonce` is a
/// caller-supplied random draw that stochastic judges may consume.
struct ComparisonRequest {
    std::string item_a;
    std::string item_b;
    std::string sentence_a;
    std::string sentence_b;
    int repetition = 0;
    std::uint64_t nonce = 0;
};

/// Decides which of two sentences conveys greater certainty that the finding
/// is present. Implementations must be safe to call concurrently.
class Judge {
public:
    virtual ~Judge() = default;
    virtual const std::string& id() const = 0;
    virtual JudgeOutcome compare(const ComparisonRequest& request) const = 0;
};

using JudgePtr = std::shared_ptr<const Judge>;

namespace detail {

inline void require_distinct(const ComparisonRequest& r) {
    if (r.item_a == r.item_b) {
        throw Error(ErrorCode::InvalidConfig, "cannot compare item '" + r.item_a + "' with itself");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// Answers from a comparison log. The n-th request for an unordered pair
/// (repetition n) returns the n-th logged record for that pair and judge.
class ReplayJudge final : public Judge {
public:
    ReplayJudge(std::string judge_id, std::span<const ComparisonRecord> log) : m_id(std::move(judge_id)) {
        for (const auto& rec : log) {
            if (rec.judge != m_id) continue;
            m_records[pair_key(rec.item_a, rec.item_b)].push_back(rec);
        }
    }

    const std::string& id() const override { return m_id; }

    JudgeOutcome compare(const ComparisonRequest& request) const override {
        detail::require_distinct(request);
        auto it = m_records.find(pair_key(request.item_a, request.item_b));
        if (it == m_records.end() || request.repetition < 0 ||
            static_cast<std::size_t>(request.repetition) >= it->second.size()) {
            throw Error(ErrorCode::ReplayMiss, "no logged comparison #" + std::to_string(request.repetition) +
                                                   " of '" + request.item_a + "' vs '" + request.item_b +
                                                   "' by judge '" + m_id + "'");
        }
        const ComparisonRecord& rec = it->second[static_cast<std::size_t>(request.repetition)];
        const std::string& winner_item = rec.winner_item();
        return {winner_item == request.item_a ? Winner::A : Winner::B, m_id};
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [_, recs] : m_records) n += recs.size();
        return n;
    }

private:
    static std::pair<std::string, std::string> pair_key(const std::string& a, const std::string& b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }

    std::string m_id;
    std::map<std::pair<std::string, std::string>, std::vector<ComparisonRecord>> m_records;
};

/// One ReplayJudge per distinct judge identity found in the log, in
/// first-appearance order.
inline std::vector<JudgePtr> replay_judges(std::span<const ComparisonRecord> log) {
    std::vector<std::string> ids;
    for (const auto& rec : log) {
        if (std::find(ids.begin(), ids.end(), rec.judge) == ids.end()) ids.push_back(rec.judge);
    }
    std::vector<JudgePtr> judges;
    for (auto& id : ids) judges.push_back(std::make_shared<ReplayJudge>(id, log));
    return judges;
}

// ---------------------------------------------------------------------------
// Synthetic
// ---------------------------------------------------------------------------

struct SyntheticJudgeConfig {
    std::map<std::string, double> latent_skill;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

/// Logistic noise model: P(A wins) = 1 / (1 + exp(-(skill_a - skill_b) / noise_scale)).
/// The outcome is a pure function of (seed, judge id, request), so the judge
/// is stateless and reproducible. An item missing from the latent table takes
/// the skill of the longest latent key found as a whole phrase in its
/// sentence, so fit targets carrying a known hedging phrase can be judged.
class SyntheticJudge final : public Judge {
public:
    SyntheticJudge(std::string judge_id, SyntheticJudgeConfig cfg) : m_id(std::move(judge_id)), m_cfg(std::move(cfg)) {
        if (!(m_cfg.noise_scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "noise_scale must be > 0");
    }

    const std::string& id() const override { return m_id; }

    double win_probability(const std::string& item_a, const std::string& item_b, std::string_view sentence_a = {},
                           std::string_view sentence_b = {}) const {
        double gap = skill(item_a, sentence_a) - skill(item_b, sentence_b);
        return 1.0 / (1.0 + std::exp(-gap / m_cfg.noise_scale));
    }

    JudgeOutcome compare(const ComparisonRequest& request) const override {
        detail::require_distinct(request);
        double p_a = win_probability(request.item_a, request.item_b, request.sentence_a, request.sentence_b);
        std::uint64_t h = radunc::detail::hash_combine(m_cfg.seed, radunc::detail::fnv1a(m_id));
        h = radunc::detail::hash_combine(h, radunc::detail::fnv1a(request.item_a));
        h = radunc::detail::hash_combine(h, radunc::detail::fnv1a(request.item_b));
        h = radunc::detail::hash_combine(h, radunc::detail::fnv1a(request.sentence_a));
        h = radunc::detail::hash_combine(h, radunc::detail::fnv1a(request.sentence_b));
        h = radunc::detail::hash_combine(h, static_cast<std::uint64_t>(request.repetition));
        h = radunc::detail::hash_combine(h, request.nonce);
        double u = radunc::detail::to_unit(h);
        return {u < p_a ? Winner::A : Winner::B, m_id};
    }

    const SyntheticJudgeConfig& config() const { return m_cfg; }

private:
    double skill(const std::string& item, std::string_view sentence) const {
        auto it = m_cfg.latent_skill.find(item);
        if (it != m_cfg.latent_skill.end()) return it->second;
        if (auto phrase = phrase_in(sentence)) return m_cfg.latent_skill.at(*phrase);
        throw Error(ErrorCode::MissingLatentSkill, "no latent skill for item '" + item + "'");
    }

    std::optional<std::string> phrase_in(std::string_view sentence) const {
        if (sentence.empty()) return std::nullopt;
        auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
        std::string hay(sentence);
        for (auto& c : hay) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        std::optional<std::string> best;
        for (const auto& [key, _] : m_cfg.latent_skill) {
            if (key.empty() || (best && key.size() <= best->size())) continue;
            std::string needle = key;
            for (auto& c : needle) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
                bool left = pos == 0 || !is_word(hay[pos - 1]);
                bool right = pos + needle.size() == hay.size() || !is_word(hay[pos + needle.size()]);
                if (left && right) {
                    best = key;
                    break;
                }
            }
        }
        return best;
    }

    std::string m_id;
    SyntheticJudgeConfig m_cfg;
};

/// `count` synthetic judges sharing one latent skill table, with seeds
/// derived from `base_seed`. Ids are synthetic-1 .. synthetic-N.
inline std::vector<JudgePtr> synthetic_panel(const std::map<std::string, double>& latent, double noise_scale,
                                             std::uint64_t base_seed, int count) {
    std::vector<JudgePtr> judges;
    for (int j = 0; j < count; ++j) {
        SyntheticJudgeConfig cfg{latent, noise_scale, radunc::detail::hash_combine(base_seed, static_cast<std::uint64_t>(j))};
        judges.push_back(std::make_shared<SyntheticJudge>("synthetic-" + std::to_string(j + 1), std::move(cfg)));
    }
    return judges;
}

// ---------------------------------------------------------------------------
// Consensus
// ---------------------------------------------------------------------------

/// Majority vote; an exact tie is broken by a fair coin drawn from `seed`.
inline Winner consensus(std::span<const JudgeOutcome> outcomes, std::uint64_t seed) {
    if (outcomes.empty()) throw Error(ErrorCode::EmptyOutcomeList, "consensus of zero outcomes");
    std::size_t votes_a = 0;
    for (const auto& o : outcomes) votes_a += o.winner == Winner::A ? 1 : 0;
    std::size_t votes_b = outcomes.size() - votes_a;
    if (votes_a != votes_b) return votes_a > votes_b ? Winner::A : Winner::B;
    std::mt19937_64 rng(seed);
    return std::bernoulli_distribution(0.5)(rng) ? Winner::A : Winner::B;
}

/// Replaces every case-insensitive mention of `finding` in `sentence` with
/// the neutral placeholder "<finding>".
inline std::string mask_finding(std::string_view sentence, std::string_view finding) {
    if (finding.empty()) return std::string(sentence);
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    const std::string hay = lower(sentence);
    const std::string needle = lower(finding);
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto hit = hay.find(needle, pos);
        if (hit == std::string::npos) break;
        out.append(sentence.substr(pos, hit - pos));
        out.append("<finding>");
        pos = hit + needle.size();
    }
    out.append(sentence.substr(pos));
    return out;
}

} // namespace radunc
