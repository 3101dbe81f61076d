// svg.hpp — minimal static SVG line plots rendered from numeric columns.
// Figure acceptance is defined on the CSVs; these files are a convenience.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "mist/errors.hpp"

namespace mist {

inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::vector<std::string>& columns,
                           const std::vector<std::vector<double>>& rows,
                           std::size_t x_col = 0) {
    const int W = 760, H = 480, ML = 70, MR = 150, MT = 40, MB = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot open plot file: " + path);

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& r : rows) {
        if (r.size() != columns.size()) continue;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (!std::isfinite(r[c])) continue;
            if (c == x_col) {
                if (first || r[c] < xmin) xmin = r[c];
                if (first || r[c] > xmax) xmax = r[c];
            } else {
                if (first || r[c] < ymin) ymin = r[c];
                if (first || r[c] > ymax) ymax = r[c];
            }
            first = false;
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double yr = ymax - ymin;
    ymin -= 0.05 * yr;
    ymax += 0.05 * yr;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' font-family='sans-serif' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    out << "<rect x='" << ML << "' y='" << MT << "' width='" << (W - ML - MR) << "' height='"
        << (H - MT - MB) << "' fill='none' stroke='#333'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        out << "<text x='" << px(xv) << "' y='" << H - MB + 18
            << "' text-anchor='middle'>" << xv << "</text>\n";
        out << "<text x='" << ML - 8 << "' y='" << py(yv) + 4
            << "' text-anchor='end'>" << yv << "</text>\n";
    }
    out << "<text x='" << (ML + (W - MR)) / 2 << "' y='" << H - 12
        << "' text-anchor='middle'>" << columns[x_col] << "</text>\n";

    int color = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c == x_col) continue;
        const char* col = palette[color % 8];
        out << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
        for (const auto& r : rows) {
            if (r.size() != columns.size() || !std::isfinite(r[c]) || !std::isfinite(r[x_col]))
                continue;
            out << px(r[x_col]) << "," << py(r[c]) << " ";
        }
        out << "'/>\n";
        out << "<text x='" << W - MR + 12 << "' y='" << MT + 16 + 16 * color << "' fill='"
            << col << "'>" << columns[c] << "</text>\n";
        ++color;
    }
    out << "</svg>\n";
}

} // namespace mist
