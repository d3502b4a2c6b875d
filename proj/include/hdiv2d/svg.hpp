// Minimal self-contained SVG log-log plot writer for convergence curves.

#ifndef HDIV2D_SVG_HPP
#define HDIV2D_SVG_HPP

#include <string>
#include <vector>

namespace hdiv2d {

struct PlotSeries {
  std::string label;
  std::vector<double> x;  // mesh size h
  std::vector<double> y;  // error
};

/// Log-log plot with one polyline per series and a reference triangle per
/// requested slope.  Returns the SVG document.
std::string loglog_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<PlotSeries>& series,
                       const std::vector<double>& reference_slopes);

void write_file(const std::string& path, const std::string& content);

}  // namespace hdiv2d

#endif
