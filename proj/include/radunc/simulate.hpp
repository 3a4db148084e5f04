#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radunc/detail/hash.hpp"
#include "radunc/detail/parallel.hpp"
#include "radunc/error.hpp"
#include "radunc/judge.hpp"
#include "radunc/ranking.hpp"
#include "radunc/trueskill.hpp"

namespace radunc {

enum class JudgeMode { all, single };

struct StrategyConfig {
    OpponentSelection strategy = OpponentSelection::draw_probability;
    JudgeMode judge_mode = JudgeMode::all;
    std::string judge_id;  // used when judge_mode == single
    std::vector<std::uint64_t> seeds;
    FitConfig fit;
    RatingConfig rating;
    int jobs = 0;  // 0 = hardware concurrency

    void validate() const {
        if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "strategy needs at least one seed");
        if (judge_mode == JudgeMode::single && judge_id.empty()) {
            throw Error(ErrorCode::InvalidConfig, "single judge mode needs a judge id");
        }
        fit.validate();
        rating.validate();
    }
};

inline std::string_view to_string(OpponentSelection s) {
    return s == OpponentSelection::draw_probability ? "draw_probability" : "random";
}

inline std::optional<OpponentSelection> parse_selection(std::string_view text) {
    if (text == "draw_probability") return OpponentSelection::draw_probability;
    if (text == "random") return OpponentSelection::random;
    return std::nullopt;
}

/// Per-iteration |estimated rank - true rank| for one refit.
struct RankTrace {
    std::string phrase;
    std::uint64_t seed = 0;
    int true_rank = 0;
    int steps_taken = 0;
    bool converged = false;
    std::vector<int> distances;  // length max_steps, final value carried forward

    int final_distance() const { return distances.empty() ? 0 : distances.back(); }
};

/// Synthetic judges whose latent skills are the ranking's own mu values.
inline std::vector<JudgePtr> judges_from_ranking(const ReferenceRanking& ranking, double noise_scale,
                                                 std::uint64_t seed, int count) {
    std::map<std::string, double> latent;
    for (const auto& e : ranking.entries) latent[e.phrase] = e.rating.mu;
    return synthetic_panel(latent, noise_scale, seed, count);
}

/// Every unordered pair of `items`, put `repetitions` times to every judge.
/// Presentation order alternates with the repetition index; each item's
/// sentence is its own text unless `sentences` supplies one.
inline std::vector<ComparisonRecord> generate_comparisons(std::span<const std::string> items,
                                                          std::span<const JudgePtr> judges, int repetitions,
                                                          const std::map<std::string, std::string>& sentences = {}) {
    if (repetitions < 1) throw Error(ErrorCode::InvalidConfig, "repetitions must be >= 1");
    auto sentence_of = [&](const std::string& item) {
        auto it = sentences.find(item);
        return it == sentences.end() ? item : it->second;
    };
    std::vector<ComparisonRecord> log;
    log.reserve(items.size() * (items.size() - (items.empty() ? 0 : 1)) / 2 * judges.size() *
                static_cast<std::size_t>(repetitions));
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t k = i + 1; k < items.size(); ++k) {
            for (int r = 0; r < repetitions; ++r) {
                const std::string& a = r % 2 == 0 ? items[i] : items[k];
                const std::string& b = r % 2 == 0 ? items[k] : items[i];
                ComparisonRequest req{a, b, sentence_of(a), sentence_of(b), r, 0};
                for (const auto& judge : judges) {
                    auto outcome = judge->compare(req);
                    log.push_back({a, b, req.sentence_a, req.sentence_b, judge->id(), outcome.winner});
                }
            }
        }
    }
    return log;
}

/// Removes each phrase in turn and fits it back into the remaining ranking,
/// once per seed. `phrases` defaults to every ranking entry. Cells run in
/// parallel; the result is ordered by phrase (ranking order) then seed.
inline std::vector<RankTrace> leave_one_out(const ReferenceRanking& ranking, std::span<const JudgePtr> judges,
                                            const StrategyConfig& cfg,
                                            std::optional<std::vector<std::string>> phrases = std::nullopt) {
    cfg.validate();
    if (ranking.size() < 2) throw Error(ErrorCode::EmptyRanking, "leave-one-out needs at least 2 ranked phrases");

    std::vector<JudgePtr> panel;
    if (cfg.judge_mode == JudgeMode::single) {
        for (const auto& j : judges) {
            if (j->id() == cfg.judge_id) panel.push_back(j);
        }
        if (panel.empty()) throw Error(ErrorCode::InvalidConfig, "no judge with id '" + cfg.judge_id + "'");
    } else {
        panel.assign(judges.begin(), judges.end());
    }

    std::vector<std::string> targets;
    if (phrases) {
        for (const auto& p : *phrases) {
            if (!ranking.find(p)) throw Error(ErrorCode::UnknownPhrase, "phrase '" + p + "' is not in the ranking");
            targets.push_back(p);
        }
    } else {
        for (const auto& e : ranking.entries) targets.push_back(e.phrase);
    }

    std::vector<ReferenceRanking> reduced;
    reduced.reserve(targets.size());
    for (const auto& p : targets) reduced.push_back(ranking.without(p));

    const std::size_t n_seeds = cfg.seeds.size();
    std::vector<RankTrace> traces(targets.size() * n_seeds);
    detail::parallel_for(traces.size(), detail::resolve_jobs(cfg.jobs), [&](std::size_t cell) {
        const std::size_t t = cell / n_seeds;
        const std::uint64_t seed = cfg.seeds[cell % n_seeds];
        const std::string& phrase = targets[t];
        const int true_rank = ranking.find(phrase)->rank;
        const std::uint64_t cell_seed = detail::hash_combine(seed, detail::fnv1a(phrase));

        FitTarget target{phrase, phrase};
        auto sit = ranking.sentences.find(phrase);
        if (sit != ranking.sentences.end() && !sit->second.empty()) {
            std::mt19937_64 rng(cell_seed);
            target.sentence = sit->second[std::uniform_int_distribution<std::size_t>(0, sit->second.size() - 1)(rng)];
        }
        FitConfig fit = cfg.fit;
        fit.seed = cell_seed;
        FitResult result = fit_item(target, reduced[t], panel, fit, cfg.rating, cfg.strategy);

        RankTrace trace;
        trace.phrase = phrase;
        trace.seed = seed;
        trace.true_rank = true_rank;
        trace.steps_taken = result.steps_taken;
        trace.converged = result.converged;
        trace.distances.resize(static_cast<std::size_t>(cfg.fit.max_steps));
        int last = std::abs(result.initial_rank - true_rank);
        for (std::size_t i = 0; i < trace.distances.size(); ++i) {
            if (i < result.trace.size()) last = std::abs(result.trace[i].rank_after - true_rank);
            trace.distances[i] = last;
        }
        traces[cell] = std::move(trace);
    });
    return traces;
}

struct LooSummary {
    double mean_final_distance = 0.0;
    double mean_phrase_std = 0.0;   // std of final distance across seeds, averaged over phrases
    double final_distance_std = 0.0;  // std over all traces
    double mean_steps = 0.0;
    std::vector<double> mean_distance_by_step;
};

inline LooSummary summarize(const std::vector<RankTrace>& traces) {
    LooSummary s;
    if (traces.empty()) return s;
    const double n = static_cast<double>(traces.size());
    std::map<std::string, std::vector<double>> by_phrase;
    for (const auto& t : traces) {
        s.mean_final_distance += t.final_distance();
        s.mean_steps += t.steps_taken;
        by_phrase[t.phrase].push_back(t.final_distance());
        if (s.mean_distance_by_step.size() < t.distances.size()) s.mean_distance_by_step.resize(t.distances.size());
        for (std::size_t i = 0; i < t.distances.size(); ++i) s.mean_distance_by_step[i] += t.distances[i];
    }
    s.mean_final_distance /= n;
    s.mean_steps /= n;
    for (auto& v : s.mean_distance_by_step) v /= n;

    auto stdev = [](const std::vector<double>& xs) {
        if (xs.size() < 2) return 0.0;
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(xs.size() - 1));
    };
    std::vector<double> all;
    for (const auto& [_, xs] : by_phrase) {
        s.mean_phrase_std += stdev(xs);
        all.insert(all.end(), xs.begin(), xs.end());
    }
    s.mean_phrase_std /= static_cast<double>(by_phrase.size());
    s.final_distance_std = stdev(all);
    return s;
}

enum class SweepParam { K, N };

struct SweepPoint {
    int value = 0;
    LooSummary summary;
};

/// One leave-one-out summary per value of K or N.
inline std::vector<SweepPoint> sweep(SweepParam param, std::span<const int> values, const StrategyConfig& base,
                                     const ReferenceRanking& ranking, std::span<const JudgePtr> judges) {
    if (values.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one value");
    std::vector<SweepPoint> out;
    for (int v : values) {
        StrategyConfig cfg = base;
        (param == SweepParam::K ? cfg.fit.K : cfg.fit.N) = v;
        out.push_back({v, summarize(leave_one_out(ranking, judges, cfg))});
    }
    return out;
}

} // namespace radunc
