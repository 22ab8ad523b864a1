#include "twinlab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace twinlab {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

void write_line_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series, bool log_y) {
    constexpr double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    constexpr std::array<const char*, 6> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    std::vector<std::vector<std::pair<double, double>>> pts;
    for (const Series& s : series) {
        pts.emplace_back();
        for (auto [x, y] : s.points) {
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            pts.back().emplace_back(x, y);
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!(x1 > x0)) { x0 -= 1.0; x1 += 1.0; }
    if (!(y1 > y0)) { y0 -= 1.0; y1 += 1.0; }
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(H - mb + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
           << tick(xv) << "</text>\n";
        os << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << (log_y ? "1e" + tick(yv) : tick(yv)) << "</text>\n";
    }
    os << "<text x=\"" << num(W / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\" font-size=\"12\">"
       << escape(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(H / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << num(H / 2) << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % colors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < pts[s].size(); ++k) {
            os << (k ? " " : "") << num(px(pts[s][k].first)) << ',' << num(py(pts[s][k].second));
        }
        os << "\"/>\n";
        os << "<text x=\"" << num(W - mr - 8) << "\" y=\"" << num(mt + 16 + 14.0 * s) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
           << color << "\">" << escape(series[s].name) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace twinlab
