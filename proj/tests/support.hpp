#pragma once

// Helpers shared by the unit tests and the acceptance binary. The oracles here
// deliberately avoid the library's own Gaussian helpers.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "radunc/error.hpp"
#include "radunc/expand.hpp"
#include "radunc/io.hpp"
#include "radunc/pathway.hpp"
#include "radunc/simulate.hpp"

namespace support {

/// Error code thrown by `fn`, or nullopt when it returns normally.
template <class F>
std::optional<radunc::ErrorCode> error_code_of(F&& fn) {
    try {
        fn();
    } catch (const radunc::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline const radunc::PathwayDictionary& bundled_dictionary() {
    static const radunc::PathwayDictionary dict =
        radunc::PathwayDictionary::load(RADUNC_DATA_DIR "/dx_pathway.csv", RADUNC_DATA_DIR "/synonyms.csv",
                                        RADUNC_DATA_DIR "/location_classes.csv");
    return dict;
}

inline const std::vector<radunc::BlacklistRule>& bundled_blacklist() {
    static const auto rules = radunc::blacklist_from_csv(radunc::csv::Table::from_file(RADUNC_DATA_DIR "/blacklist.csv"));
    return rules;
}

/// Random reports over diagnosis and sub-finding terms, with keys that may
/// collide within a study.
inline std::vector<radunc::FindingRecord> random_dataset(std::mt19937_64& rng, bool distinct_original_keys) {
    static const std::vector<std::string> findings{
        "pleural effusion", "atelectasis", "pulmonary edema", "consolidation", "pneumonia", "cardiomegaly",
        "CHF",              "pneumothorax", "emphysema",      "COPD",          "fracture",  "lung cancer",
        "TB",               "bronchitis",  "opacity",        "blunting",      "fever",     "heart size"};
    static const std::vector<std::optional<std::string>> locations{std::nullopt, std::nullopt, "left", "RLL", "rib",
                                                                   "pacemaker lead", "costophrenic angle"};
    static const std::vector<std::string> attrs{"acute", "old", "loculated", "tension", "lobar", "small", "chronic"};
    static const std::vector<std::optional<std::string>> view_list{std::nullopt, "PA", "AP", "PA, erect", "lateral",
                                                                   "AP supine"};
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::vector<radunc::FindingRecord> out;
    int studies = 1 + static_cast<int>(pick(4));
    for (int s = 0; s < studies; ++s) {
        std::set<std::pair<std::string, std::optional<std::string>>> used;
        int n = 1 + static_cast<int>(pick(8));
        for (int i = 0; i < n; ++i) {
            radunc::FindingRecord r;
            r.study_id = "s" + std::to_string(s);
            r.finding = findings[pick(findings.size())];
            r.location = locations[pick(locations.size())];
            if (distinct_original_keys) {
                auto key = std::pair{bundled_dictionary().normalize(r.finding),
                                     r.location ? std::optional(bundled_dictionary().normalize(*r.location)) : std::nullopt};
                if (!used.insert(key).second) continue;
            }
            for (const auto& a : attrs) {
                if (pick(6) == 0) r.attributes.insert(a);
            }
            r.view = view_list[pick(view_list.size())];
            r.status = radunc::kAllStatuses[pick(4)];
            if (radunc::is_tentative(r.status)) r.prob = static_cast<double>(1 + pick(99)) / 100.0;
            r.sentence = "sentence " + std::to_string(i);
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Inverse normal CDF by bisection on erfc.
inline double norm_ppf(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (norm_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

/// Mean and standard deviation of the density proportional to
/// N(x; mu, sd^2) * weight(x), by composite Simpson quadrature over mu +- 12 sd.
inline Moments tilted_moments(double mu, double sd, const std::function<double(double)>& weight) {
    const int n = 4000;  // even
    const double a = mu - 12.0 * sd;
    const double h = 24.0 * sd / n;
    double z = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = a + i * h;
        double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        double u = (x - mu) / sd;
        double f = c * std::exp(-0.5 * u * u) * weight(x);
        z += f;
        m1 += f * x;
        m2 += f * x * x;
    }
    double mean = m1 / z;
    return {mean, std::sqrt(m2 / z - mean * mean)};
}

/// Exact posterior moments of a two-player win under Gaussian performances
/// with per-player noise beta^2 and a draw margin derived from the draw
/// probability. Returns {winner, loser}.
inline std::pair<Moments, Moments> win_posterior(double mu_w, double sigma_w, double mu_l, double sigma_l,
                                                 double beta_sq, double tau, double draw_probability) {
    const double var_w = sigma_w * sigma_w + tau * tau;
    const double var_l = sigma_l * sigma_l + tau * tau;
    const double eps = draw_probability > 0.0 ? norm_ppf((draw_probability + 1.0) / 2.0) * std::sqrt(2.0 * beta_sq) : 0.0;
    // Given the winner's skill s, P(win) = Phi((s - mu_l - eps) / sqrt(var_l + 2 beta^2)); symmetric for the loser.
    const double spread_l = std::sqrt(var_l + 2.0 * beta_sq);
    const double spread_w = std::sqrt(var_w + 2.0 * beta_sq);
    auto winner = tilted_moments(mu_w, std::sqrt(var_w), [&](double s) { return norm_cdf((s - mu_l - eps) / spread_l); });
    auto loser = tilted_moments(mu_l, std::sqrt(var_l), [&](double s) { return norm_cdf((mu_w - s - eps) / spread_w); });
    return {winner, loser};
}

/// The 42-phrase latent table from samples/, ordered by skill descending.
inline std::vector<std::pair<std::string, double>> latent_phrases() {
    auto table = radunc::io::parse_latent(radunc::csv::Table::from_file(RADUNC_SAMPLES_DIR "/latent_phrases.csv"));
    std::vector<std::pair<std::string, double>> out(table.begin(), table.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

inline std::map<std::string, double> latent_map() {
    auto v = latent_phrases();
    return {v.begin(), v.end()};
}

/// Every pair of the latent phrases judged `reps` times by `judges` synthetic
/// judges, then rated over `seeds`.
inline radunc::ReferenceRanking synthetic_ranking(std::span<const std::uint64_t> seeds, int reps = 10, int judges = 4,
                                                  double noise_scale = 3.0, std::uint64_t judge_seed = 7) {
    auto latent = latent_map();
    std::vector<std::string> items;
    for (const auto& [p, _] : latent) items.push_back(p);
    auto panel = radunc::synthetic_panel(latent, noise_scale, judge_seed, judges);
    auto log = radunc::generate_comparisons(items, panel, reps);
    return radunc::build_reference_ranking(log, items, radunc::RatingConfig{}, seeds);
}

inline std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
    return out;
}

} // namespace support
