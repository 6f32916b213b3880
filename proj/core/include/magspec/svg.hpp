#pragma once

#include <optional>
#include <string>
#include <vector>

namespace magspec {

struct PlotPoint {
    double x;
    double y;
};

struct PlotSpec {
    std::string title = "lambda / q";
    std::string x_label = "q";
    std::string y_label = "lambda / q";
    std::optional<double> reference_y; ///< horizontal reference line (Theta0)
    std::string reference_label = "Theta0";
    int width = 640;
    int height = 420;
};

/// Deterministic SVG line plot; needs at least two points.
std::string emit_svg(const std::vector<PlotPoint>& rows, const PlotSpec& spec);

} // namespace magspec
