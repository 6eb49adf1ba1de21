#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lcd {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
};

struct PlotText {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string footer;  // provenance line printed under the axes
};

/// Static SVG line chart with markers and optional error bars. Output depends only on the inputs.
void write_line_plot_svg(const std::filesystem::path& path, const PlotText& text, const std::vector<Series>& series);

/// Grouped bar chart: one group per category, one bar per series (series.y indexed by category).
void write_bar_chart_svg(const std::filesystem::path& path, const PlotText& text, const std::vector<std::string>& categories,
                         const std::vector<Series>& series);

}  // namespace lcd
