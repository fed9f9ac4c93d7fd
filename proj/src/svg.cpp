#include "hnm/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hnm {

namespace {

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return out;
}

}  // namespace

std::string series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    return palette[i % 10];
}

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::polyline(const std::vector<PlanarPoint>& pts, const std::string& color, double width) {
    items_.push_back({Item::Kind::Line, pts, color, width});
}

void SvgPlot::points(const std::vector<PlanarPoint>& pts, const std::string& color, double radius) {
    items_.push_back({Item::Kind::Dots, pts, color, radius});
}

void SvgPlot::segment(PlanarPoint a, PlanarPoint b, const std::string& color, double width) {
    items_.push_back({Item::Kind::Segment, {a, b}, color, width});
}

void SvgPlot::legend(const std::string& label, const std::string& color) { legend_.emplace_back(label, color); }

std::string SvgPlot::render(int width, int height) const {
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& it : items_)
        for (auto p : it.pts) {
            if (!p.finite()) continue;
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    if (xhi - xlo <= 0) xlo -= 0.5, xhi += 0.5;
    if (yhi - ylo <= 0) ylo -= 0.5, yhi += 0.5;
    const double padx = 0.05 * (xhi - xlo), pady = 0.05 * (yhi - ylo);
    xlo -= padx, xhi += padx, ylo -= pady, yhi += pady;

    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;
    auto X = [&](double x) { return left + (x - xlo) / (xhi - xlo) * pw; };
    auto Y = [&](double y) { return top + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(title_) << "</text>\n";
    o << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xlo, xhi)) {
        o << "<line x1=\"" << fmt(X(t)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(X(t)) << "\" y2=\""
          << fmt(top + ph + 5) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << fmt(X(t)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
          << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(ylo, yhi)) {
        o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(Y(t)) << "\" x2=\"" << fmt(left) << "\" y2=\""
          << fmt(Y(t)) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(Y(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
          << "</text>\n";
    }
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << esc(xlabel_)
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt(top + ph / 2) << ")\">" << esc(ylabel_) << "</text>\n";

    for (const auto& it : items_) {
        switch (it.kind) {
            case Item::Kind::Line: {
                o << "<polyline fill=\"none\" stroke=\"" << it.color << "\" stroke-width=\"" << fmt(it.size)
                  << "\" points=\"";
                for (auto p : it.pts)
                    if (p.finite()) o << fmt(X(p.x)) << "," << fmt(Y(p.y)) << " ";
                o << "\"/>\n";
                break;
            }
            case Item::Kind::Dots:
                for (auto p : it.pts)
                    if (p.finite())
                        o << "<circle cx=\"" << fmt(X(p.x)) << "\" cy=\"" << fmt(Y(p.y)) << "\" r=\"" << fmt(it.size)
                          << "\" fill=\"" << it.color << "\"/>\n";
                break;
            case Item::Kind::Segment:
                o << "<line x1=\"" << fmt(X(it.pts[0].x)) << "\" y1=\"" << fmt(Y(it.pts[0].y)) << "\" x2=\""
                  << fmt(X(it.pts[1].x)) << "\" y2=\"" << fmt(Y(it.pts[1].y)) << "\" stroke=\"" << it.color
                  << "\" stroke-width=\"" << fmt(it.size) << "\"/>\n";
                break;
        }
    }
    double ly = top + 14;
    for (const auto& [label, color] : legend_) {
        o << "<rect x=\"" << fmt(left + pw - 150) << "\" y=\"" << fmt(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
          << color << "\"/><text x=\"" << fmt(left + pw - 135) << "\" y=\"" << fmt(ly) << "\">" << esc(label)
          << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace hnm
