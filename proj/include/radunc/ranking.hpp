#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radunc/detail/hash.hpp"
#include "radunc/error.hpp"
#include "radunc/judge.hpp"
#include "radunc/model.hpp"
#include "radunc/trueskill.hpp"

namespace radunc {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

/// One hedging phrase extracted for a (finding, sentence) pair.
struct Extraction {
    std::string phrase;
    std::string finding;
    std::string sentence;
};

struct Vocabulary {
    std::vector<HedgingPhrase> phrases;  // count descending, then phrase ascending
    int threshold = 10;

    std::vector<std::string> texts() const {
        std::vector<std::string> out;
        out.reserve(phrases.size());
        for (const auto& p : phrases) out.push_back(p.text);
        return out;
    }
};

/// Keeps phrases extracted at least `threshold` times (inclusive).
inline Vocabulary build_vocabulary(std::span<const Extraction> extractions, int threshold = 10) {
    if (threshold < 1) throw Error(ErrorCode::InvalidConfig, "vocabulary threshold must be >= 1");
    std::map<std::string, std::vector<Occurrence>> grouped;
    for (const auto& e : extractions) grouped[e.phrase].push_back({e.finding, e.sentence});

    Vocabulary vocab;
    vocab.threshold = threshold;
    for (auto& [text, occ] : grouped) {
        if (static_cast<int>(occ.size()) >= threshold) vocab.phrases.push_back({text, std::move(occ)});
    }
    std::stable_sort(vocab.phrases.begin(), vocab.phrases.end(),
                     [](const HedgingPhrase& a, const HedgingPhrase& b) { return a.count() > b.count(); });
    return vocab;
}

// ---------------------------------------------------------------------------
// Reference ranking
// ---------------------------------------------------------------------------

struct RankedPhrase {
    std::string phrase;
    Rating rating;
    int rank = 0;  // 1-based, 1 = highest mu
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::map<std::string, Rating> ratings;
};

struct ReferenceRanking {
    std::vector<RankedPhrase> entries;  // mu descending, ties by phrase ascending
    std::vector<SeedRun> per_seed;
    /// Example sentences per phrase, sampled as opponent sentences when
    /// fitting. A phrase without sentences is represented by its own text.
    std::map<std::string, std::vector<std::string>> sentences;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
    std::size_t seeds_used() const { return per_seed.size(); }

    const RankedPhrase* find(const std::string& phrase) const {
        for (const auto& e : entries) {
            if (e.phrase == phrase) return &e;
        }
        return nullptr;
    }

    /// Re-sorts entries and assigns 1-based ranks.
    void reorder() {
        std::sort(entries.begin(), entries.end(), [](const RankedPhrase& a, const RankedPhrase& b) {
            if (a.rating.mu != b.rating.mu) return a.rating.mu > b.rating.mu;
            return a.phrase < b.phrase;
        });
        for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i + 1);
    }

    /// Copy with `phrase` removed and ranks recomputed.
    ReferenceRanking without(const std::string& phrase) const {
        ReferenceRanking out;
        for (const auto& e : entries) {
            if (e.phrase != phrase) out.entries.push_back(e);
        }
        for (const auto& [p, s] : sentences) {
            if (p != phrase) out.sentences.emplace(p, s);
        }
        out.reorder();
        return out;
    }
};

/// Plays every comparison through the rating engine once per seed, each time
/// in a seed-specific shuffled order, then averages mu and sigma per phrase.
/// When `phrases` is non-empty, comparisons naming any other item are
/// rejected with UnknownPhrase; otherwise the item set is whatever appears.
inline ReferenceRanking build_reference_ranking(std::span<const ComparisonRecord> comparisons,
                                                std::span<const std::string> phrases, const RatingConfig& cfg,
                                                std::span<const std::uint64_t> seeds) {
    cfg.validate();
    if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "at least one seed is required");

    std::set<std::string> items(phrases.begin(), phrases.end());
    if (!phrases.empty()) {
        std::set<std::string> unknown;
        for (const auto& c : comparisons) {
            if (!items.count(c.item_a)) unknown.insert(c.item_a);
            if (!items.count(c.item_b)) unknown.insert(c.item_b);
        }
        if (!unknown.empty()) {
            std::string list;
            for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + ("'" + u + "'");
            throw Error(ErrorCode::UnknownPhrase, "comparisons reference phrases outside the vocabulary: " + list);
        }
    } else {
        for (const auto& c : comparisons) {
            items.insert(c.item_a);
            items.insert(c.item_b);
        }
    }
    for (const auto& c : comparisons) {
        if (c.item_a == c.item_b) throw Error(ErrorCode::InvalidConfig, "self-comparison of '" + c.item_a + "'");
    }

    ReferenceRanking ranking;
    std::vector<std::size_t> order(comparisons.size());
    for (auto seed : seeds) {
        std::map<std::string, Rating> ratings;
        for (const auto& item : items) ratings.emplace(item, cfg.initial());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::mt19937_64 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
        for (auto idx : order) {
            const auto& c = comparisons[idx];
            Rating& w = ratings.at(c.winner_item());
            Rating& l = ratings.at(c.loser_item());
            std::tie(w, l) = update(w, l, cfg);
        }
        ranking.per_seed.push_back({seed, std::move(ratings)});
    }

    const double n = static_cast<double>(seeds.size());
    for (const auto& item : items) {
        double mu = 0.0;
        double sigma = 0.0;
        for (const auto& run : ranking.per_seed) {
            mu += run.ratings.at(item).mu;
            sigma += run.ratings.at(item).sigma;
        }
        ranking.entries.push_back({item, {mu / n, sigma / n}, 0});
    }
    ranking.reorder();

    for (const auto& c : comparisons) {
        auto add = [&](const std::string& item, const std::string& sentence) {
            auto& bucket = ranking.sentences[item];
            if (std::find(bucket.begin(), bucket.end(), sentence) == bucket.end()) bucket.push_back(sentence);
        };
        add(c.item_a, c.sentence_a);
        add(c.item_b, c.sentence_b);
    }
    return ranking;
}

/// 1-based position `mu` would take in the ranking: one plus the number of
/// entries with strictly greater mu.
inline int rank_of(double mu, const ReferenceRanking& ranking) {
    int above = 0;
    for (const auto& e : ranking.entries) above += e.rating.mu > mu ? 1 : 0;
    return above + 1;
}

// ---------------------------------------------------------------------------
// Fitting a new item into the ranking
// ---------------------------------------------------------------------------

struct FitConfig {
    int K = 10;           // leading steps judged by every judge
    int N = 5;            // comparisons allowed per opponent
    int max_steps = 100;
    int patience = 10;    // consecutive steps with unchanged rank before stopping
    std::uint64_t seed = 0;

    void validate() const {
        if (K < 0 || K > max_steps) throw Error(ErrorCode::InvalidConfig, "K must lie in [0, max_steps]");
        if (N < 1) throw Error(ErrorCode::InvalidConfig, "N must be >= 1");
        if (patience < 1) throw Error(ErrorCode::InvalidConfig, "patience must be >= 1");
        if (max_steps < 1) throw Error(ErrorCode::InvalidConfig, "max_steps must be >= 1");
    }

    friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

enum class OpponentSelection { draw_probability, random };

struct FitTarget {
    std::string item;      // judge-facing identifier of the target
    std::string sentence;  // masked sentence shown to judges
};

struct FitStep {
    std::string opponent;
    std::string opponent_sentence;
    std::vector<JudgeOutcome> outcomes;  // Winner::A means the target won
    Rating rating_after;
    int rank_after = 0;
};

struct FitResult {
    Rating rating;
    int steps_taken = 0;
    int initial_rank = 0;
    bool converged = false;  // stopped by patience rather than max_steps
    std::vector<FitStep> trace;

    int final_rank() const { return trace.empty() ? initial_rank : trace.back().rank_after; }
};

/// Places a target sentence in the reference ranking by repeated comparisons
/// against reference phrases. Only the target's rating moves; reference
/// ratings act as fixed opponents.
inline FitResult fit_item(const FitTarget& target, const ReferenceRanking& ranking, std::span<const JudgePtr> judges,
                          const FitConfig& fit_cfg, const RatingConfig& rating_cfg,
                          OpponentSelection selection = OpponentSelection::draw_probability) {
    fit_cfg.validate();
    rating_cfg.validate();
    if (ranking.empty()) throw Error(ErrorCode::EmptyRanking, "cannot fit into an empty ranking");
    if (judges.empty()) throw Error(ErrorCode::InvalidConfig, "at least one judge is required");

    const std::size_t n_opp = ranking.size();
    const std::size_t n_judges = judges.size();
    std::vector<int> opp_counts(n_opp, 0);
    std::vector<std::vector<int>> judge_counts(n_opp, std::vector<int>(n_judges, 0));
    std::mt19937_64 rng(detail::hash_combine(fit_cfg.seed, detail::fnv1a(target.item)));

    FitResult result;
    result.rating = rating_cfg.initial();
    result.initial_rank = rank_of(result.rating.mu, ranking);
    int rank = result.initial_rank;
    int stable = 0;

    while (result.steps_taken < fit_cfg.max_steps && stable < fit_cfg.patience) {
        // Opponent choice among phrases still under the per-opponent cap.
        std::optional<std::size_t> chosen;
        if (selection == OpponentSelection::draw_probability) {
            double best = -1.0;
            for (std::size_t i = 0; i < n_opp; ++i) {
                if (opp_counts[i] >= fit_cfg.N) continue;
                double dp = draw_probability(result.rating, ranking.entries[i].rating, rating_cfg);
                bool better = dp > best ||
                              (dp == best && chosen && ranking.entries[i].phrase < ranking.entries[*chosen].phrase);
                if (better) {
                    best = dp;
                    chosen = i;
                }
            }
        } else {
            std::vector<std::size_t> open;
            for (std::size_t i = 0; i < n_opp; ++i) {
                if (opp_counts[i] < fit_cfg.N) open.push_back(i);
            }
            if (!open.empty()) {
                chosen = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
            }
        }
        if (!chosen) {
            throw Error(ErrorCode::ExhaustedOpponents,
                        "every opponent reached the cap of " + std::to_string(fit_cfg.N) + " comparisons after " +
                            std::to_string(result.steps_taken) + " steps");
        }
        const std::size_t opp = *chosen;
        const RankedPhrase& opponent = ranking.entries[opp];
        ++opp_counts[opp];

        FitStep step;
        step.opponent = opponent.phrase;
        auto sit = ranking.sentences.find(opponent.phrase);
        if (sit != ranking.sentences.end() && !sit->second.empty()) {
            step.opponent_sentence =
                sit->second[std::uniform_int_distribution<std::size_t>(0, sit->second.size() - 1)(rng)];
        } else {
            step.opponent_sentence = opponent.phrase;
        }

        std::vector<std::size_t> panel;
        if (result.steps_taken < fit_cfg.K) {
            for (std::size_t j = 0; j < n_judges; ++j) panel.push_back(j);
        } else {
            panel.push_back(std::uniform_int_distribution<std::size_t>(0, n_judges - 1)(rng));
        }

        for (auto j : panel) {
            ComparisonRequest req{target.item, opponent.phrase, target.sentence, step.opponent_sentence,
                                  judge_counts[opp][j]++, rng()};
            JudgeOutcome outcome = judges[j]->compare(req);
            if (outcome.winner == Winner::A) {
                result.rating = update(result.rating, opponent.rating, rating_cfg).first;
            } else {
                result.rating = update(opponent.rating, result.rating, rating_cfg).second;
            }
            step.outcomes.push_back(std::move(outcome));
        }

        int new_rank = rank_of(result.rating.mu, ranking);
        stable = new_rank == rank ? stable + 1 : 0;
        rank = new_rank;
        step.rating_after = result.rating;
        step.rank_after = rank;
        result.trace.push_back(std::move(step));
        ++result.steps_taken;
    }
    result.converged = stable >= fit_cfg.patience;
    return result;
}

// ---------------------------------------------------------------------------
// Skill to probability
// ---------------------------------------------------------------------------

/// p = 1 / (1 + exp(-alpha (mu - mu0))).
struct SigmoidMap {
    double alpha = 0.089;
    double mu0 = 24.89;

    friend bool operator==(const SigmoidMap&, const SigmoidMap&) = default;
};

struct Anchor {
    double mu = 0.0;
    double p = 0.5;
};

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Solves logit(p) = alpha (mu - mu0) through both anchors.
inline SigmoidMap calibrate_sigmoid(Anchor low, Anchor high) {
    auto in_open_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (!in_open_unit(low.p) || !in_open_unit(high.p)) {
        throw Error(ErrorCode::DegenerateAnchors, "anchor probabilities must lie in (0,1)");
    }
    if (!(low.mu < high.mu)) throw Error(ErrorCode::DegenerateAnchors, "anchor mus must satisfy mu_low < mu_high");
    if (!(low.p < high.p)) throw Error(ErrorCode::DegenerateAnchors, "anchor probabilities must satisfy p_low < p_high");
    SigmoidMap map;
    map.alpha = (logit(high.p) - logit(low.p)) / (high.mu - low.mu);
    map.mu0 = low.mu - logit(low.p) / map.alpha;
    return map;
}

inline double map_probability(double mu, const SigmoidMap& map) {
    return 1.0 / (1.0 + std::exp(-map.alpha * (mu - map.mu0)));
}

} // namespace radunc
