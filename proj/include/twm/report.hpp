#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "twm/model.hpp"

namespace twm::report {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Table {
    std::vector<std::string> meta;  // written as "# ..." lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadScenario, "cannot write '" + path + "'");
    for (const auto& m : t.meta) out << "# " << m << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << num(r[i]);
        out << '\n';
    }
}

struct Series {
    std::string name;
    std::vector<double> y;
};

// One panel of line plots, static SVG.
inline void write_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::vector<double>& x, const std::vector<Series>& series) {
    const double W = 640, H = 400, L = 70, R = 150, T = 40, B = 50;
    double x0 = x.empty() ? 0 : x.front(), x1 = x.empty() ? 1 : x.back();
    double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
    for (const auto& s : series)
        for (double v : s.y)
            if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
    if (!(x1 > x0)) x1 = x0 + 1;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadScenario, "cannot write '" + path + "'");
    char buf[160];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << L << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                  W - L - R, H - T - B);
    out << buf;
    for (int i = 0; i <= 4; ++i) {
        double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", px(xv), H - B + 16, xv);
        out << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", L - 6, py(yv) + 4, yv);
        out << buf;
    }
    out << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 12) << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* c = colors[k % 6];
        out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i) {
            if (!std::isfinite(series[k].y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[k].y[i]));
            out << buf;
        }
        out << "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - R + 10, T + 16 + 18.0 * k, c,
                      series[k].name.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace twm::report
