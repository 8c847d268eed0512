#pragma once

// Self-contained SVG line charts: axes, ticks, one polyline per series, legend.

#include <qamp/harness/csv.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qamp::harness {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
    /// Empty picks from the built-in palette.
    std::string color;
    bool dashed = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 640;
    int height = 420;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Fixed two-decimal rendering for coordinates; keeps the file small and stable.
inline std::string coord(double v) {
    return format_number(std::round(v * 100.0) / 100.0);
}

/// Roughly five ticks at 1/2/5 multiples of a power of ten.
inline std::vector<double> ticks(double lo, double hi) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) out.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return out;
}

inline std::string tick_label(double v) {
    const double r = std::round(v * 1000.0) / 1000.0;
    return format_number(r);
}

} // namespace detail

inline void write_svg(std::ostream& out, const Chart& chart) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    const double left = 64, right = 20, top = 40, bottom = 56;
    const double pw = chart.width - left - right, ph = chart.height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : chart.series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    ymin = std::min(ymin, 0.0);
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    ymax += (ymax - ymin) * 0.05;

    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
    using detail::coord;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
        << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << coord(chart.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << detail::xml_escape(chart.title) << "</text>\n";

    out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(left + pw) << "\" y2=\""
        << coord(top + ph) << "\"/>\n";
    out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left) << "\" y2=\""
        << coord(top + ph) << "\"/>\n";
    out << "</g>\n";

    out << "<g fill=\"#333\">\n";
    for (double t : detail::ticks(xmin, xmax)) {
        out << "<line x1=\"" << coord(sx(t)) << "\" y1=\"" << coord(top + ph) << "\" x2=\"" << coord(sx(t)) << "\" y2=\""
            << coord(top + ph + 5) << "\" stroke=\"#333\"/>";
        out << "<text x=\"" << coord(sx(t)) << "\" y=\"" << coord(top + ph + 18) << "\" text-anchor=\"middle\">"
            << detail::tick_label(t) << "</text>\n";
    }
    for (double t : detail::ticks(ymin, ymax)) {
        out << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(sy(t)) << "\" x2=\"" << coord(left) << "\" y2=\""
            << coord(sy(t)) << "\" stroke=\"#333\"/>";
        out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(sy(t) + 4) << "\" text-anchor=\"end\">"
            << detail::tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(chart.height - 14.0)
        << "\" text-anchor=\"middle\">" << detail::xml_escape(chart.x_label) << "</text>\n";
    out << "<text transform=\"translate(16 " << coord(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << detail::xml_escape(chart.y_label) << "</text>\n";
    out << "</g>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const Series& s = chart.series[i];
        const std::string color = s.color.empty() ? palette[i % std::size(palette)] : s.color;
        out << "<g class=\"series\" data-name=\"" << detail::xml_escape(s.name) << "\">\n";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        bool first = true;
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (!first) out << ' ';
            out << coord(sx(x)) << ',' << coord(sy(y));
            first = false;
        }
        out << "\"/>\n";
        for (auto [x, y] : s.points)
            if (std::isfinite(x) && std::isfinite(y))
                out << "<circle cx=\"" << coord(sx(x)) << "\" cy=\"" << coord(sy(y)) << "\" r=\"3\" fill=\"" << color
                    << "\"/>\n";
        const double ly = top + 8 + 18.0 * static_cast<double>(i);
        out << "<line x1=\"" << coord(left + pw - 150) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(left + pw - 126)
            << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        out << "<text x=\"" << coord(left + pw - 120) << "\" y=\"" << coord(ly + 4) << "\">" << detail::xml_escape(s.name)
            << "</text>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
}

} // namespace qamp::harness
