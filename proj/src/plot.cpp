#include "freqsynth/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace freqsynth::plot {

std::string line_plot_svg(std::span<const double> x, std::span<const double> y, std::string_view title, bool log_y) {
  constexpr double kWidth = 640, kHeight = 400, kMargin = 50;

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    if (log_y && !(y[i] > 0)) continue;
    pts.emplace_back(x[i], log_y ? std::log10(y[i]) : y[i]);
  }

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"{2}\" y=\"{2}\" width=\"{3}\" height=\"{4}\" fill=\"none\" stroke=\"black\"/>\n"
      "<text x=\"{5}\" y=\"{6}\" text-anchor=\"middle\" font-size=\"14\">{7}</text>\n",
      kWidth, kHeight, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin, kWidth / 2, kMargin / 2, title);
  if (pts.empty()) return svg + "</svg>\n";

  auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.first < b.first; });
  auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.second < b.second; });
  const double x0 = xmin->first, x1 = xmax->first, y0 = ymin->second, y1 = ymax->second;
  const double xs = x1 > x0 ? (kWidth - 2 * kMargin) / (x1 - x0) : 0.0;
  const double ys = y1 > y0 ? (kHeight - 2 * kMargin) / (y1 - y0) : 0.0;

  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& [px, py] : pts) {
    svg += fmt::format("{:.2f},{:.2f} ", kMargin + (px - x0) * xs, kHeight - kMargin - (py - y0) * ys);
  }
  svg += "\"/>\n";
  const char* prefix = log_y ? "1e" : "";
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{}{:.3g}</text>\n", 2, kHeight - kMargin, prefix, y0);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{}{:.3g}</text>\n", 2, kMargin + 10, prefix, y1);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\">{:.4g}</text>\n", kMargin, kHeight - kMargin + 15, x0);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n", kWidth - kMargin,
                     kHeight - kMargin + 15, x1);
  return svg + "</svg>\n";
}

} // namespace freqsynth::plot
