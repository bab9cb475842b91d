#ifndef TFE_SVG_HPP
#define TFE_SVG_HPP

#include <span>
#include <string>
#include <vector>

namespace tfe::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = true;  // points; otherwise a polyline
  bool dashed = false;
};

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
};

/// Escapes &, <, >, " and ' for XML text and attributes.
std::string escape(const std::string& s);

/// Scatter/line chart. Non-finite points, and non-positive ones on log
/// axes, are skipped.
std::string plot(const Axes& axes, std::span<const Series> series);

/// Density-scaled histogram with the standard normal density overlaid.
std::string histogram_with_normal(const std::string& title, std::span<const double> sample,
                                  std::size_t bins);

/// Normal QQ pairs (theoretical, ordered sample) at plotting positions
/// (i - 0.5) / n.
std::vector<std::pair<double, double>> qq_points(std::span<const double> sample);

std::string qq_plot(const std::string& title, std::span<const double> sample);

}  // namespace tfe::svg

#endif  // TFE_SVG_HPP
