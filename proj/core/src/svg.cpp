#include "gcs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gcs/common.hpp"

namespace gcs {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 40.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double to_unit(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    if (h == l) return 0.5;
    return (a - l) / (h - l);
  }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int e0 = static_cast<int>(std::floor(std::log10(lo)));
      const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
      for (int e = e0; e <= e1; ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) t.push_back(v);
      }
      if (t.empty()) t = {lo, hi};
    } else {
      const double span = hi - lo;
      if (span <= 0.0) return {lo};
      const double raw = span / 5.0;
      const double mag = std::pow(10.0, std::floor(std::log10(raw)));
      double step = mag;
      for (double candidate : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * candidate >= raw) {
          step = mag * candidate;
          break;
        }
      }
      for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
        t.push_back(v);
    }
    return t;
  }
};

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const PlotOptions& options) {
  require(!series.empty(), "plot needs at least one series");
  std::size_t total_points = 0;
  for (const auto& s : series) total_points += s.points.size();
  require(total_points > 0, "plot needs at least one point");

  Axis x{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         options.log_x};
  Axis y{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         options.log_y};
  for (const auto& s : series) {
    for (const auto& [px, py] : s.points) {
      require(!options.log_x || px > 0.0, "log x axis needs positive values");
      x.lo = std::min(x.lo, px);
      x.hi = std::max(x.hi, px);
      if (options.log_y && py <= 0.0) continue;  // dropped below, keep range sane
      y.lo = std::min(y.lo, py);
      y.hi = std::max(y.hi, py);
    }
  }
  if (!std::isfinite(y.lo)) {  // every value was clipped from a log axis
    y.lo = 1e-16;
    y.hi = 1.0;
  }
  if (x.lo == x.hi) {
    x.lo = options.log_x ? x.lo / 2.0 : x.lo - 1.0;
    x.hi = options.log_x ? x.hi * 2.0 : x.hi + 1.0;
  }
  if (y.lo == y.hi) {
    y.lo = options.log_y ? y.lo / 2.0 : y.lo - 1.0;
    y.hi = options.log_y ? y.hi * 2.0 : y.hi + 1.0;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + x.to_unit(v) * plot_w; };
  auto py = [&](double v) { return kTop + (1.0 - y.to_unit(v)) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
      << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' '
      << fmt(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << options.title << "</text>\n";

  // frame
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (double tick : x.ticks()) {
    const double gx = px(tick);
    out << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(gx)
        << "\" y2=\"" << fmt(kTop + plot_h)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(tick) << "</text>\n";
  }
  for (double tick : y.ticks()) {
    const double gy = py(tick);
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(gy) << "\" x2=\""
        << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(gy)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(tick) << "</text>\n";
  }

  out << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << options.x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << fmt(kTop + plot_h / 2) << ")\">" << options.y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream poly;
    bool any = false;
    for (const auto& [vx, vy] : series[s].points) {
      double clipped = vy;
      if (options.log_y && vy <= 0.0) clipped = y.lo;  // clamp to the axis floor
      poly << fmt(px(vx)) << ',' << fmt(py(clipped)) << ' ';
      any = true;
    }
    if (!any) continue;
    if (series[s].points.size() > 1) {
      out << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\"/>\n";
    }
    for (const auto& [vx, vy] : series[s].points) {
      double clipped = vy;
      if (options.log_y && vy <= 0.0) clipped = y.lo;
      out << "<circle cx=\"" << fmt(px(vx)) << "\" cy=\"" << fmt(py(clipped))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 16 * static_cast<double>(s);
    out << "<line x1=\"" << fmt(kLeft + plot_w - 120) << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << fmt(kLeft + plot_w - 100) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(kLeft + plot_w - 94) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& options,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << render_line_plot(series, options);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gcs
