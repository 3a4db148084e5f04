#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "radunc/detail/strings.hpp"

namespace radunc::svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string num(double v) { return radunc::detail::format_fixed(v, 2); }

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline double nice_step(double span, int target_ticks) {
    if (span <= 0.0) return 1.0;
    double raw = span / target_ticks;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

} // namespace detail

/// Static line chart with axes, ticks and a legend. Output depends only on
/// the inputs, so identical data gives identical bytes.
inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series, int width = 720, int height = 420) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    const double left = 70, right = 170, top = 40, bottom = 55;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = 0.0, y_max = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!std::isfinite(x_min)) {
        x_min = 0.0;
        x_max = 1.0;
    }
    if (!std::isfinite(y_max)) y_max = 1.0;
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_step = detail::nice_step(y_max - y_min, 5);
    y_max = std::ceil(y_max / y_step) * y_step;
    const double x_step = detail::nice_step(x_max - x_min, 8);

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + detail::num(left + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           detail::escape(title) + "</text>\n";

    for (double y = y_min; y <= y_max + 1e-9; y += y_step) {
        out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(py(y)) + "\" x2=\"" +
               detail::num(left + plot_w) + "\" y2=\"" + detail::num(py(y)) + "\" stroke=\"#e0e0e0\"/>\n";
        out += "<text x=\"" + detail::num(left - 6) + "\" y=\"" + detail::num(py(y) + 4) + "\" text-anchor=\"end\">" +
               radunc::detail::format_double(std::round(y * 1000.0) / 1000.0) + "</text>\n";
    }
    for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
        out += "<text x=\"" + detail::num(px(x)) + "\" y=\"" + detail::num(top + plot_h + 16) +
               "\" text-anchor=\"middle\">" + radunc::detail::format_double(std::round(x * 1000.0) / 1000.0) +
               "</text>\n";
    }
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top + plot_h) + "\" x2=\"" +
           detail::num(left + plot_w) + "\" y2=\"" + detail::num(top + plot_h) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(top) + "\" x2=\"" + detail::num(left) +
           "\" y2=\"" + detail::num(top + plot_h) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::num(left + plot_w / 2) + "\" y=\"" + detail::num(height - 12.0) +
           "\" text-anchor=\"middle\">" + detail::escape(x_label) + "</text>\n";
    out += "<text transform=\"translate(18," + detail::num(top + plot_h / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + detail::escape(y_label) + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (!pts.empty()) pts.push_back(' ');
            pts += detail::num(px(x)) + "," + detail::num(py(y));
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(i);
        out += "<line x1=\"" + detail::num(left + plot_w + 12) + "\" y1=\"" + detail::num(ly) + "\" x2=\"" +
               detail::num(left + plot_w + 32) + "\" y2=\"" + detail::num(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail::num(left + plot_w + 36) + "\" y=\"" + detail::num(ly + 4) + "\">" +
               detail::escape(s.name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace radunc::svg
