#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radunc/error.hpp"
#include "radunc/model.hpp"

namespace radunc {

/// Categorical A/B decisions, one row per item and one column per rater.
struct DecisionMatrix {
    std::vector<std::string> items;
    std::vector<std::string> raters;
    std::vector<std::vector<std::optional<Winner>>> decisions;  // [item][rater]

    DecisionMatrix() = default;
    DecisionMatrix(std::vector<std::string> item_ids, std::vector<std::string> rater_ids)
        : items(std::move(item_ids)), raters(std::move(rater_ids)),
          decisions(items.size(), std::vector<std::optional<Winner>>(raters.size())) {}

    std::size_t rater_index(const std::string& rater) const {
        auto it = std::find(raters.begin(), raters.end(), rater);
        if (it == raters.end()) throw Error(ErrorCode::UnknownKey, "unknown rater '" + rater + "'");
        return static_cast<std::size_t>(it - raters.begin());
    }

    void set(std::size_t item, std::size_t rater, std::optional<Winner> w) { decisions.at(item).at(rater) = w; }
};

/// Fraction of items rated by both raters on which they agree.
inline double pairwise_agreement(const DecisionMatrix& m, const std::string& rater_x, const std::string& rater_y) {
    const std::size_t x = m.rater_index(rater_x);
    const std::size_t y = m.rater_index(rater_y);
    std::size_t joint = 0;
    std::size_t same = 0;
    for (const auto& row : m.decisions) {
        if (!row[x] || !row[y]) continue;
        ++joint;
        same += *row[x] == *row[y] ? 1 : 0;
    }
    if (joint == 0) throw Error(ErrorCode::NoOverlap, "raters '" + rater_x + "' and '" + rater_y + "' share no items");
    return static_cast<double>(same) / static_cast<double>(joint);
}

/// Fleiss' kappa for two categories on a complete matrix.
inline double fleiss_kappa(const DecisionMatrix& m) {
    const std::size_t n_raters = m.raters.size();
    if (n_raters < 2) throw Error(ErrorCode::InsufficientData, "fleiss_kappa needs at least 2 raters");
    if (m.decisions.empty()) throw Error(ErrorCode::InsufficientData, "fleiss_kappa needs at least 1 item");
    const double n = static_cast<double>(n_raters);
    double p_bar = 0.0;
    double total_a = 0.0;
    for (std::size_t i = 0; i < m.decisions.size(); ++i) {
        double a = 0.0;
        for (const auto& cell : m.decisions[i]) {
            if (!cell) {
                throw Error(ErrorCode::MissingEntries, "item '" + (i < m.items.size() ? m.items[i] : std::to_string(i)) +
                                                           "' has a missing decision");
            }
            a += *cell == Winner::A ? 1.0 : 0.0;
        }
        double b = n - a;
        p_bar += (a * (a - 1.0) + b * (b - 1.0)) / (n * (n - 1.0));
        total_a += a;
    }
    const double n_items = static_cast<double>(m.decisions.size());
    p_bar /= n_items;
    const double pa = total_a / (n_items * n);
    const double pe = pa * pa + (1.0 - pa) * (1.0 - pa);
    if (pe == 1.0) return 1.0;  // single category used throughout
    return (p_bar - pe) / (1.0 - pe);
}

/// Krippendorff's alpha with nominal distance; missing cells are skipped and
/// items with fewer than two decisions are not pairable.
inline double krippendorff_alpha(const DecisionMatrix& m) {
    if (m.raters.size() < 2) throw Error(ErrorCode::InsufficientData, "krippendorff_alpha needs at least 2 raters");
    // Coincidence matrix over categories {A, B}.
    double o[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (const auto& row : m.decisions) {
        double counts[2] = {0.0, 0.0};
        for (const auto& cell : row) {
            if (cell) counts[*cell == Winner::A ? 0 : 1] += 1.0;
        }
        const double mu = counts[0] + counts[1];
        if (mu < 2.0) continue;
        for (int c = 0; c < 2; ++c) {
            for (int k = 0; k < 2; ++k) {
                double pairs = c == k ? counts[c] * (counts[c] - 1.0) : counts[c] * counts[k];
                o[c][k] += pairs / (mu - 1.0);
            }
        }
    }
    const double n_c[2] = {o[0][0] + o[0][1], o[1][0] + o[1][1]};
    const double n = n_c[0] + n_c[1];
    if (n == 0.0) throw Error(ErrorCode::InsufficientData, "no item has two or more decisions");
    const double d_o = o[0][1] + o[1][0];
    const double d_e = 2.0 * n_c[0] * n_c[1] / (n - 1.0);
    if (d_e == 0.0) return 1.0;
    return 1.0 - d_o / d_e;
}

/// 1-based average ranks of `values` (ties share the mean of their positions).
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::InsufficientData, "correlation of a constant sequence");
    return sxy / std::sqrt(sxx * syy);
}

/// Spearman's rho between two rankings of the same items, using average ranks
/// for ties.
inline double spearman_rho(std::span<const std::pair<std::string, double>> ranking_x,
                           std::span<const std::pair<std::string, double>> ranking_y) {
    std::map<std::string, double> x;
    std::map<std::string, double> y;
    for (const auto& [item, r] : ranking_x) {
        if (!x.emplace(item, r).second) throw Error(ErrorCode::ItemMismatch, "duplicate item '" + item + "'");
    }
    for (const auto& [item, r] : ranking_y) {
        if (!y.emplace(item, r).second) throw Error(ErrorCode::ItemMismatch, "duplicate item '" + item + "'");
    }
    if (x.size() != y.size()) throw Error(ErrorCode::ItemMismatch, "rankings cover different item sets");
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [item, r] : x) {
        auto it = y.find(item);
        if (it == y.end()) throw Error(ErrorCode::ItemMismatch, "item '" + item + "' missing from second ranking");
        xs.push_back(r);
        ys.push_back(it->second);
    }
    if (xs.size() < 2) throw Error(ErrorCode::InsufficientData, "spearman_rho needs at least 2 items");
    auto rx = average_ranks(xs);
    auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

} // namespace radunc
