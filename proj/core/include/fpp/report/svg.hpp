#pragma once

#include <array>
#include <string>
#include <vector>

#include "fpp/data/dataset.hpp"
#include "fpp/report/json.hpp"
#include "fpp/types.hpp"

namespace fpp {

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;  // each in [0, 1]
};

/// Perceptually uniform map sampled at nine anchors; t is clamped to [0, 1].
Rgb viridis(double t);
/// Ten-hue categorical palette; indices wrap.
Rgb tab10(std::size_t index);
std::string css_hex(const Rgb& c);

std::string xml_escape(const std::string& text);

/// "+0.71 x0, -0.70 x1, +0.02 x4"
std::string axis_caption(const std::vector<AxisWeight>& weights);

struct ScatterPanel {
  Points2 points;
  /// Colour source: continuous values or categorical labels.
  Response colour;
  std::string title;
};

struct AxisCaptions {
  std::string x = "y1";
  std::string y = "y2";
};

/// One <circle> per row; throws ValidationError on non-finite coordinates.
std::string scatter_svg(const ScatterPanel& panel, const AxisCaptions& axes = {});
/// Panels share axis limits and colour scale, laid out left to right.
std::string panels_svg(const std::vector<ScatterPanel>& panels, const AxisCaptions& axes = {});

/// Bar histogram of `samples` with a red vertical line at `observed`.
std::string histogram_svg(const std::vector<double>& samples, double observed, const std::string& title,
                          const std::string& x_label, std::size_t bins = 30);

struct HeatmapSpec {
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::string title;
  std::string row_axis;
  std::string col_axis;
  /// Colour limits; values outside are clamped for rendering only.
  double lo = 0.0;
  double hi = 1.0;
};

/// One <rect> per cell with its value printed inside.
std::string heatmap_svg(const HeatmapSpec& spec);

}  // namespace fpp
