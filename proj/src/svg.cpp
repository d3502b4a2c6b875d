#include "hdiv2d/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdiv2d {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<PlotSeries>& series,
                       const std::vector<double>& reference_slopes) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 160, mt = 40, mb = 50;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (xmin > xmax) { xmin = -2; xmax = 0; ymin = -8; ymax = 0; }
  const double xpad = 0.05 * std::max(xmax - xmin, 1e-6);
  const double ypad = 0.05 * std::max(ymax - ymin, 1e-6);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  // h decreasing to the right
  auto X = [&](double v) {
    return ml + (width - ml - mr) * (xmax - std::log10(v)) / (xmax - xmin);
  };
  auto Y = [&](double v) {
    return height - mb - (height - mt - mb) * (std::log10(v) - ymin) / (ymax - ymin);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\"20\" "
     << "text-anchor=\"middle\" font-size=\"15\" font-family=\"sans-serif\">"
     << title << "</text>\n";

  // frame
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (width - ml - mr)
     << "\" height=\"" << (height - mt - mb)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // decade grid lines and tick labels
  for (int d = int(std::ceil(xmin)); d <= int(std::floor(xmax)); ++d) {
    const double px = X(std::pow(10.0, d));
    os << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px
       << "\" y2=\"" << (height - mb) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << px << "\" y=\"" << (height - mb + 18)
       << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">1e"
       << d << "</text>\n";
  }
  for (int d = int(std::ceil(ymin)); d <= int(std::floor(ymax)); ++d) {
    const double py = Y(std::pow(10.0, d));
    os << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << (width - mr)
       << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << (ml - 8) << "\" y=\"" << (py + 4)
       << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e"
       << d << "</text>\n";
  }
  os << "<text x=\"" << (ml + (width - ml - mr) / 2) << "\" y=\""
     << (height - 10)
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
     << x_label << " (decreasing)</text>\n";
  os << "<text x=\"18\" y=\"" << (mt + (height - mt - mb) / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
     << "transform=\"rotate(-90 18 " << (mt + (height - mt - mb) / 2) << ")\">"
     << y_label << "</text>\n";

  int ci = 0;
  double legend_y = mt + 10;
  for (const PlotSeries& s : series) {
    const char* color = kColors[ci++ % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.6\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
    os << "\"/>\n";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<line x1=\"" << (width - mr + 10) << "\" y1=\"" << legend_y
       << "\" x2=\"" << (width - mr + 34) << "\" y2=\"" << legend_y
       << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"/>\n";
    os << "<text x=\"" << (width - mr + 40) << "\" y=\"" << (legend_y + 4)
       << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label
       << "</text>\n";
    legend_y += 18;
  }

  // reference slope triangles anchored at the last series' final point
  if (!series.empty() && series.back().x.size() >= 2) {
    const PlotSeries& s = series.back();
    for (double p : reference_slopes) {
      const double x1 = s.x.back(), x0 = 2.0 * x1;
      const double y0 = 1.6 * s.y.back();
      const double y1 = y0 * std::pow(x1 / x0, p);
      os << "<polygon fill=\"none\" stroke=\"#999\" points=\""
         << fmt(X(x0)) << "," << fmt(Y(y0)) << " " << fmt(X(x1)) << ","
         << fmt(Y(y1)) << " " << fmt(X(x1)) << "," << fmt(Y(y0)) << "\"/>\n";
      os << "<text x=\"" << fmt(X(x1) + 4) << "\" y=\""
         << fmt(0.5 * (Y(y0) + Y(y1)))
         << "\" font-size=\"11\" fill=\"#777\" font-family=\"sans-serif\">"
         << p << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

}  // namespace hdiv2d
