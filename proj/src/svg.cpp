#include "tcsde/svg.hpp"

#include "tcsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tcsde {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 20.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 52.0;

constexpr const char* kPalette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400",
                                    "#555555"};

std::string escape(const std::string& s) {
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

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double w = std::max(0.5, 0.1 * std::abs(hi));
            lo -= w;
            hi += w;
        }
    }
};

std::vector<double> ticks(const Range& r, bool log_axis) {
    std::vector<double> out;
    if (log_axis) {
        for (double d = std::ceil(r.lo); d <= std::floor(r.hi) + 1e-9; d += 1.0) {
            out.push_back(d);
        }
        if (out.size() >= 2) {
            return out;
        }
        out.clear();
    }
    for (int i = 0; i <= 4; ++i) {
        out.push_back(r.lo + (r.hi - r.lo) * i / 4.0);
    }
    return out;
}

}  // namespace

std::string render_svg(const Plot& plot, PlotKind kind) {
    const bool log_axes = kind == PlotKind::loglog;
    if (plot.series.empty()) {
        throw RenderError("cli_io", "nothing to plot");
    }

    std::vector<std::vector<std::pair<double, double>>> pts(plot.series.size());
    Range xr;
    Range yr;
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const Series& ser = plot.series[s];
        if (ser.x.size() != ser.y.size()) {
            throw RenderError("cli_io", "series '" + ser.name + "' has mismatched x and y");
        }
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            double x = ser.x[i];
            double y = ser.y[i];
            if (log_axes) {
                if (!(x > 0.0) || !(y > 0.0)) {
                    continue;
                }
                x = std::log10(x);
                y = std::log10(y);
            }
            if (!std::isfinite(x) || !std::isfinite(y)) {
                continue;
            }
            pts[s].emplace_back(x, y);
            xr.add(x);
            yr.add(y);
        }
        if (pts[s].size() < 2) {
            throw RenderError("cli_io", "series '" + ser.name + "' has fewer than two points");
        }
    }
    xr.pad();
    yr.pad();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };
    auto label = [&](double v) {
        return log_axes ? fmt("%.3g", std::pow(10.0, v)) : fmt("%.4g", v);
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
    if (plot.annotation) {
        o << "<text x=\"" << kWidth / 2 << "\" y=\"36\" text-anchor=\"middle\">"
          << escape(*plot.annotation) << "</text>\n";
    }

    o << "<g stroke=\"#999\" stroke-width=\"0.5\">\n";
    for (double t : ticks(xr, log_axes)) {
        o << "<line x1=\"" << fmt("%.2f", px(t)) << "\" y1=\"" << kTop << "\" x2=\""
          << fmt("%.2f", px(t)) << "\" y2=\"" << kTop + ph << "\"/>\n";
    }
    for (double t : ticks(yr, log_axes)) {
        o << "<line x1=\"" << kLeft << "\" y1=\"" << fmt("%.2f", py(t)) << "\" x2=\""
          << kLeft + pw << "\" y2=\"" << fmt("%.2f", py(t)) << "\"/>\n";
    }
    o << "</g>\n";
    o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xr, log_axes)) {
        o << "<text x=\"" << fmt("%.2f", px(t)) << "\" y=\"" << kTop + ph + 14
          << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
    }
    for (double t : ticks(yr, log_axes)) {
        o << "<text x=\"" << kLeft - 4 << "\" y=\"" << fmt("%.2f", py(t) + 4)
          << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(14 " << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.y_label) << "</text>\n";

    for (std::size_t s = 0; s < pts.size(); ++s) {
        const char* colour = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
        if (plot.series[s].dashed) {
            o << " stroke-dasharray=\"6 4\"";
        }
        o << " points=\"";
        for (std::size_t i = 0; i < pts[s].size(); ++i) {
            o << (i ? " " : "") << fmt("%.2f", px(pts[s][i].first)) << ','
              << fmt("%.2f", py(pts[s][i].second));
        }
        o << "\"/>\n";
    }

    // Legend, top right inside the frame.
    const double lx = kLeft + pw - 150;
    for (std::size_t s = 0; s < plot.series.size(); ++s) {
        const double ly = kTop + 14 + 16.0 * static_cast<double>(s);
        o << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\""
          << ly - 4 << "\" stroke=\"" << kPalette[s % std::size(kPalette)]
          << "\" stroke-width=\"1.5\"" << (plot.series[s].dashed ? " stroke-dasharray=\"6 4\"" : "")
          << "/>\n";
        o << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << escape(plot.series[s].name)
          << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Plot convergence_plot(const ConvergenceReport& r) {
    Plot p;
    p.title = "strong error";
    p.x_label = "delta";
    p.y_label = "sqrt(mse)";
    Series data{"sqrt(mse)", {}, {}, false};
    Series fit{"fit", {}, {}, true};
    for (const auto& row : r.rows) {
        if (row.mse > 0.0) {
            data.x.push_back(row.delta);
            data.y.push_back(std::sqrt(row.mse));
            fit.x.push_back(row.delta);
            fit.y.push_back(std::exp(r.intercept) * std::pow(row.delta, r.slope));
        }
    }
    p.series = {data, fit};
    p.annotation = "slope = " + fmt("%.3f", r.slope) + ", R^2 = " + fmt("%.3f", r.r_squared);
    return p;
}

Plot stability_plot(const StabilityCurve& c, const std::string& title) {
    Plot p;
    p.title = title;
    p.x_label = "n delta";
    p.y_label = "E|X_n|^2";
    p.series.push_back({"msq", c.times, c.msq, false});
    if (c.envelope) {
        p.series.push_back({"envelope", c.times, *c.envelope, true});
    }
    return p;
}

}  // namespace tcsde
