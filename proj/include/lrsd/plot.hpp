// Copyright 2026 The lrsd-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef LRSD_PLOT_HPP
#define LRSD_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/io.hpp"

/// Minimal deterministic SVG line plots. Output depends only on the input
/// data: no timestamps, fixed series order, fixed number formatting.
namespace lrsd::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err;  // optional, same length as y
    bool dashed = false;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

namespace detail {

inline std::string esc(const std::string &s) {
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

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

inline const char *palette(size_t k) {
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[k % 8];
}

}  // namespace detail

/// Digest of every plotted number, embedded in the SVG as a comment.
inline std::string data_digest(const Figure &f) {
    uint64_t h = io::fnv1a(f.title + "\x1f" + f.x_label + "\x1f" + f.y_label);
    for (const auto &s : f.series) {
        h = io::fnv1a(s.label, h);
        for (size_t i = 0; i < s.x.size(); i++) {
            h = io::fnv1a(io::fmt_double(s.x[i]) + "," + io::fmt_double(s.y[i]) + ";", h);
            if (!s.err.empty()) h = io::fnv1a(io::fmt_double(s.err[i]), h);
        }
    }
    return io::hex64(h);
}

inline std::string render_svg(const Figure &f, int width = 640, int height = 420) {
    size_t points = 0;
    for (const auto &s : f.series) {
        if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
            fail(ErrorKind::SchemaMismatch, "plot series '" + s.label + "' has mismatched columns");
        points += s.x.size();
    }
    if (points == 0) fail(ErrorKind::SchemaMismatch, "nothing to plot");

    auto tx = [&](double v) { return f.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return f.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!f.log_x || x > 0) && (!f.log_y || y > 0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &s : f.series) {
        for (size_t i = 0; i < s.x.size(); i++) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            double lo = s.y[i], hi = s.y[i];
            if (!s.err.empty() && std::isfinite(s.err[i])) {
                hi += s.err[i];
                if (!f.log_y || lo - s.err[i] > 0) lo -= s.err[i];
            }
            y0 = std::min(y0, ty(lo));
            y1 = std::max(y1, ty(hi));
        }
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) fail(ErrorKind::SchemaMismatch, "no finite points to plot");
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double ml = 70, mr = 150, mt = 40, mb = 55;
    double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<!-- data-digest: " + data_digest(f) + " -->\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + detail::num(ml + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::esc(f.title) + "</text>\n";
    o += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) + "\" width=\"" + detail::num(pw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    // Five ticks per axis, labelled in data units.
    for (int k = 0; k <= 4; k++) {
        double u = x0 + (x1 - x0) * k / 4.0, v = y0 + (y1 - y0) * k / 4.0;
        double xd = f.log_x ? std::pow(10.0, u) : u, yd = f.log_y ? std::pow(10.0, v) : v;
        double X = ml + pw * k / 4.0, Y = mt + ph - ph * k / 4.0;
        o += "<line x1=\"" + detail::num(X) + "\" y1=\"" + detail::num(mt + ph) + "\" x2=\"" + detail::num(X) +
             "\" y2=\"" + detail::num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + detail::num(X) + "\" y=\"" + detail::num(mt + ph + 18) + "\" text-anchor=\"middle\">" +
             detail::tick(xd) + "</text>\n";
        o += "<line x1=\"" + detail::num(ml - 5) + "\" y1=\"" + detail::num(Y) + "\" x2=\"" + detail::num(ml) +
             "\" y2=\"" + detail::num(Y) + "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + detail::num(ml - 8) + "\" y=\"" + detail::num(Y + 4) + "\" text-anchor=\"end\">" +
             detail::tick(yd) + "</text>\n";
    }
    o += "<text x=\"" + detail::num(ml + pw / 2) + "\" y=\"" + detail::num(height - 12.0) +
         "\" text-anchor=\"middle\">" + detail::esc(f.x_label) + (f.log_x ? " (log)" : "") + "</text>\n";
    o += "<text x=\"16\" y=\"" + detail::num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::num(mt + ph / 2) + ")\">" + detail::esc(f.y_label) + (f.log_y ? " (log)" : "") + "</text>\n";

    for (size_t k = 0; k < f.series.size(); k++) {
        const Series &s = f.series[k];
        const char *c = detail::palette(k);
        std::string path;
        for (size_t i = 0; i < s.x.size(); i++) {
            if (!usable(s.x[i], s.y[i])) continue;
            path += (path.empty() ? "M" : " L") + detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i]));
        }
        o += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        if (!s.dashed) {
            for (size_t i = 0; i < s.x.size(); i++) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (!s.err.empty() && std::isfinite(s.err[i]) && s.err[i] > 0) {
                    double lo = s.y[i] - s.err[i];
                    if (f.log_y && lo <= 0) lo = s.y[i];
                    o += "<line x1=\"" + detail::num(px(s.x[i])) + "\" y1=\"" + detail::num(py(lo)) + "\" x2=\"" +
                         detail::num(px(s.x[i])) + "\" y2=\"" + detail::num(py(s.y[i] + s.err[i])) + "\" stroke=\"" +
                         c + "\"/>\n";
                }
                o += "<circle cx=\"" + detail::num(px(s.x[i])) + "\" cy=\"" + detail::num(py(s.y[i])) +
                     "\" r=\"2.5\" fill=\"" + c + "\"/>\n";
            }
        }
        double ly = mt + 14 + 18.0 * k;
        o += "<line x1=\"" + detail::num(ml + pw + 12) + "\" y1=\"" + detail::num(ly - 4) + "\" x2=\"" +
             detail::num(ml + pw + 32) + "\" y2=\"" + detail::num(ly - 4) + "\" stroke=\"" + c + "\"" +
             (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        o += "<text x=\"" + detail::num(ml + pw + 38) + "\" y=\"" + detail::num(ly) + "\">" + detail::esc(s.label) +
             "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

}  // namespace lrsd::plot

#endif
