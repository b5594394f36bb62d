#pragma once

#include <string>
#include <vector>

namespace gcs {

// Minimal deterministic SVG line plots: fixed canvas, fixed palette, fixed
// number formatting, so identical inputs produce byte-identical files.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const PlotOptions& options);
void write_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options,
                     const std::string& path);

}  // namespace gcs
