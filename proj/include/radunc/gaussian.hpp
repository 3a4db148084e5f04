#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace radunc::gaussian {

inline double pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse standard normal CDF. Domain (0, 1).
inline double ppf(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Upper-tail Mills ratio R(z) = (1 - Phi(z)) / phi(z) for large z, by
/// backward evaluation of Laplace's continued fraction.
inline double mills_ratio_tail(double z) {
    double acc = z;
    for (int k = 80; k >= 1; --k) acc = z + k / acc;
    return 1.0 / acc;
}

/// phi(x) / Phi(x). Switches to the continued fraction below -5, where the
/// direct ratio loses precision and eventually underflows to 0/0.
inline double v_ratio(double x) {
    if (x < -5.0) return 1.0 / mills_ratio_tail(-x);
    return pdf(x) / cdf(x);
}

/// Truncated-Gaussian mean correction for a win with draw margin `eps`
/// (both already divided by c).
inline double v_win(double t, double eps) {
    return v_ratio(t - eps);
}

/// Matching variance correction, in (0, 1).
inline double w_win(double t, double eps) {
    double x = t - eps;
    double v = v_win(t, eps);
    double w = v * (v + x);
    if (w >= 1.0) return 1.0 - 1e-15;
    if (w <= 0.0) return 1e-300;
    return w;
}

} // namespace radunc::gaussian
