#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "interphase/sweep.hpp"
#include "interphase/util.hpp"

namespace interphase {

struct PlotOptions {
    // x is always logarithmic (the sweep variable spans decades). y defaults to
    // linear because the corrected curve legitimately crosses zero outside the
    // intermediate-contrast band; log y is an explicit opt-in.
    bool log_y = false;
    std::string title;
    std::string x_label = "sigma2";
    std::string y_label = "effective conductivity";
    std::vector<std::string> curves;  // empty: every column except sigma2/outside_band
};

namespace detail {

inline std::string fmt2(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

inline std::string tick_label(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
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

}  // namespace detail

// Renders the selected columns of a sweep CSV as an SVG line chart. The output
// depends only on the table contents and options, so repeated renders are
// byte-identical.
inline std::string render_plot(const CsvTable& table, const PlotOptions& opts = {}) {
    const int x_col = table.column_index("sigma2");
    if (x_col < 0) throw std::invalid_argument("table has no sigma2 column");

    std::vector<std::string> curves = opts.curves;
    if (curves.empty()) {
        for (const auto& name : table.columns)
            if (name != "sigma2" && name != "outside_band") curves.push_back(name);
    }
    if (curves.empty()) throw std::invalid_argument("no curves to plot");
    std::vector<int> cols;
    for (const auto& name : curves) {
        int c = table.column_index(name);
        if (c < 0) throw std::invalid_argument("column not in table: " + name);
        cols.push_back(c);
    }

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    for (const auto& row : table.rows) {
        double x = row[static_cast<std::size_t>(x_col)];
        if (!(x > 0)) throw std::invalid_argument("log-scale x requires positive sigma2 values");
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        for (int c : cols) {
            double y = row[static_cast<std::size_t>(c)];
            if (opts.log_y && !(y > 0))
                throw std::invalid_argument("log-scale y requires positive values");
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (!(x_hi > x_lo)) x_hi = x_lo * 10;
    auto x_of = [&](double x) { return std::log10(x); };
    auto y_of = [&](double y) { return opts.log_y ? std::log10(y) : y; };
    double u_lo = x_of(x_lo), u_hi = x_of(x_hi);
    double v_lo = y_of(y_lo), v_hi = y_of(y_hi);
    if (v_hi - v_lo < 1e-12) {  // flat data: open up a visible band
        v_lo -= 0.5;
        v_hi += 0.5;
    }
    double v_pad = 0.05 * (v_hi - v_lo);
    v_lo -= v_pad;
    v_hi += v_pad;

    const double W = 860, H = 560;
    const double L = 80, R = 840, T = 46, B = 500;
    auto px = [&](double x) { return L + (x_of(x) - u_lo) / (u_hi - u_lo) * (R - L); };
    auto py = [&](double y) { return B - (y_of(y) - v_lo) / (v_hi - v_lo) * (B - T); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    const int n_colors = static_cast<int>(sizeof(palette) / sizeof(palette[0]));

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        svg << "<text x=\"" << detail::fmt2((L + R) / 2) << "\" y=\"24\" font-size=\"16\" "
            << "font-family=\"sans-serif\" text-anchor=\"middle\">"
            << detail::xml_escape(opts.title) << "</text>\n";

    // Axes frame.
    svg << "<rect x=\"" << detail::fmt2(L) << "\" y=\"" << detail::fmt2(T) << "\" width=\""
        << detail::fmt2(R - L) << "\" height=\"" << detail::fmt2(B - T)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // X ticks at integer decades.
    for (int d = static_cast<int>(std::ceil(u_lo - 1e-9)); d <= std::floor(u_hi + 1e-9); ++d) {
        double x = std::pow(10.0, d);
        double X = px(x);
        svg << "<line x1=\"" << detail::fmt2(X) << "\" y1=\"" << detail::fmt2(B) << "\" x2=\""
            << detail::fmt2(X) << "\" y2=\"" << detail::fmt2(B + 6) << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << detail::fmt2(X) << "\" y1=\"" << detail::fmt2(T) << "\" x2=\""
            << detail::fmt2(X) << "\" y2=\"" << detail::fmt2(B)
            << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        svg << "<text x=\"" << detail::fmt2(X) << "\" y=\"" << detail::fmt2(B + 22)
            << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">"
            << detail::tick_label(x) << "</text>\n";
    }
    // Y ticks: decades when logarithmic, otherwise six evenly spaced values.
    std::vector<double> y_ticks;
    if (opts.log_y) {
        for (int d = static_cast<int>(std::ceil(v_lo - 1e-9)); d <= std::floor(v_hi + 1e-9); ++d)
            y_ticks.push_back(std::pow(10.0, d));
    } else {
        for (int i = 0; i <= 5; ++i) y_ticks.push_back(v_lo + (v_hi - v_lo) * i / 5.0);
    }
    for (double y : y_ticks) {
        double Y = py(y);
        svg << "<line x1=\"" << detail::fmt2(L - 6) << "\" y1=\"" << detail::fmt2(Y)
            << "\" x2=\"" << detail::fmt2(L) << "\" y2=\"" << detail::fmt2(Y)
            << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << detail::fmt2(L) << "\" y1=\"" << detail::fmt2(Y) << "\" x2=\""
            << detail::fmt2(R) << "\" y2=\"" << detail::fmt2(Y)
            << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        svg << "<text x=\"" << detail::fmt2(L - 10) << "\" y=\"" << detail::fmt2(Y + 4)
            << "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"end\">"
            << detail::tick_label(y) << "</text>\n";
    }
    svg << "<text x=\"" << detail::fmt2((L + R) / 2) << "\" y=\"" << detail::fmt2(B + 44)
        << "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\">"
        << detail::xml_escape(opts.x_label) << "</text>\n";
    svg << "<text x=\"20\" y=\"" << detail::fmt2((T + B) / 2)
        << "\" font-size=\"14\" font-family=\"sans-serif\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 20 " << detail::fmt2((T + B) / 2) << ")\">"
        << detail::xml_escape(opts.y_label) << "</text>\n";

    // Curves.
    for (std::size_t k = 0; k < cols.size(); ++k) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[k % n_colors]
            << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& row : table.rows) {
            if (!first) svg << ' ';
            first = false;
            svg << detail::fmt2(px(row[static_cast<std::size_t>(x_col)])) << ','
                << detail::fmt2(py(row[static_cast<std::size_t>(cols[k])]));
        }
        svg << "\"/>\n";
    }

    // Legend (top-left inside the frame, one row per curve).
    for (std::size_t k = 0; k < curves.size(); ++k) {
        double ly = T + 18 + 18 * static_cast<double>(k);
        svg << "<line x1=\"" << detail::fmt2(L + 12) << "\" y1=\"" << detail::fmt2(ly)
            << "\" x2=\"" << detail::fmt2(L + 40) << "\" y2=\"" << detail::fmt2(ly)
            << "\" stroke=\"" << palette[k % n_colors] << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << detail::fmt2(L + 46) << "\" y=\"" << detail::fmt2(ly + 4)
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << detail::xml_escape(curves[k])
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void write_plot(const std::string& svg_path, const CsvTable& table,
                       const PlotOptions& opts = {}) {
    std::string svg = render_plot(table, opts);
    std::ofstream os(svg_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + svg_path);
    os << svg;
    if (!os) throw std::runtime_error("write failed: " + svg_path);
}

}  // namespace interphase
