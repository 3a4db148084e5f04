#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "radunc/error.hpp"
#include "radunc/gaussian.hpp"
#include "radunc/model.hpp"

namespace radunc {

/// Rating-engine parameters. Note that `beta_sq` is the per-match performance
/// *variance*; the common library convention of beta = 25/6 corresponds to
/// beta_sq = (25/6)^2.
struct RatingConfig {
    double mu0 = 25.0;
    double sigma0 = 25.0 / 3.0;
    double beta_sq = 25.0 / 6.0;
    double tau = 25.0 / 300.0;
    double draw_probability = 0.10;

    Rating initial() const { return {mu0, sigma0}; }

    void validate() const {
        if (!(sigma0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma0 must be > 0");
        if (!(beta_sq > 0.0)) throw Error(ErrorCode::InvalidConfig, "beta_sq must be > 0");
        if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidConfig, "tau must be >= 0");
        if (!(draw_probability >= 0.0 && draw_probability < 1.0)) {
            throw Error(ErrorCode::InvalidConfig, "draw_probability must lie in [0,1)");
        }
    }

    friend bool operator==(const RatingConfig&, const RatingConfig&) = default;
};

namespace trueskill {

inline void require_positive_sigma(const Rating& r) {
    if (!(r.sigma > 0.0)) {
        throw Error(ErrorCode::NonPositiveSigma, "sigma must be > 0, got " + std::to_string(r.sigma));
    }
}

/// Draw margin for a two-player match: Phi^-1((p + 1) / 2) * sqrt(2) * beta.
inline double draw_margin(const RatingConfig& cfg) {
    if (cfg.draw_probability <= 0.0) return 0.0;
    return gaussian::ppf((cfg.draw_probability + 1.0) / 2.0) * std::sqrt(2.0 * cfg.beta_sq);
}

} // namespace trueskill

/// Two-player win/loss update. Returns the new (winner, loser) ratings.
inline std::pair<Rating, Rating> update(const Rating& winner, const Rating& loser, const RatingConfig& cfg) {
    trueskill::require_positive_sigma(winner);
    trueskill::require_positive_sigma(loser);

    const double tau_sq = cfg.tau * cfg.tau;
    const double var_w = winner.sigma * winner.sigma + tau_sq;
    const double var_l = loser.sigma * loser.sigma + tau_sq;
    const double c_sq = 2.0 * cfg.beta_sq + var_w + var_l;
    const double c = std::sqrt(c_sq);

    const double t = (winner.mu - loser.mu) / c;
    const double eps = trueskill::draw_margin(cfg) / c;
    const double v = gaussian::v_win(t, eps);
    const double w = gaussian::w_win(t, eps);

    Rating new_winner{winner.mu + var_w / c * v, std::sqrt(var_w * (1.0 - var_w / c_sq * w))};
    Rating new_loser{loser.mu - var_l / c * v, std::sqrt(var_l * (1.0 - var_l / c_sq * w))};
    return {new_winner, new_loser};
}

/// Closeness of two ratings used for opponent selection:
/// exp(-(mu_a - mu_b)^2 / (2 c^2)) * sqrt(2 beta^2 / c^2).
inline double draw_probability(const Rating& a, const Rating& b, const RatingConfig& cfg) {
    trueskill::require_positive_sigma(a);
    trueskill::require_positive_sigma(b);
    const double c_sq = 2.0 * cfg.beta_sq + a.sigma * a.sigma + b.sigma * b.sigma;
    const double diff = a.mu - b.mu;
    return std::exp(-diff * diff / (2.0 * c_sq)) * std::sqrt(2.0 * cfg.beta_sq / c_sq);
}

} // namespace radunc
