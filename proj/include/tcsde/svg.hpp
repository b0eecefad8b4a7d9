#pragma once

#include "tcsde/experiments.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tcsde {

enum class PlotKind { line, loglog };

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::optional<std::string> annotation;
};

/// Self-contained SVG document. Throws RenderError when a series has fewer
/// than two plottable points.
std::string render_svg(const Plot& plot, PlotKind kind);

/// MSE points and the fitted power law, slope in the annotation.
Plot convergence_plot(const ConvergenceReport& r);
/// msq and, when present, the dashed envelope.
Plot stability_plot(const StabilityCurve& c, const std::string& title);

}  // namespace tcsde
