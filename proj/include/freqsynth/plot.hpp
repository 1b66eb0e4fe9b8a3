#pragma once

#include <span>
#include <string>
#include <string_view>

namespace freqsynth::plot {

// Polyline with a bounding axis box and min/max labels. Non-positive values
// are dropped when log_y is set.
std::string line_plot_svg(std::span<const double> x, std::span<const double> y, std::string_view title,
                          bool log_y = false);

} // namespace freqsynth::plot
