#ifndef HULLCERT_SVG_HPP_
#define HULLCERT_SVG_HPP_

/**
 * @file
 * @brief Minimal SVG line plots on a fixed 800 x 600 canvas.
 */

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hullcert/core.hpp"

namespace hullcert::svg {

struct Series
{
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool closed = false;  ///< draw as a closed polygon
  bool dashed = false;
};

class Plot
{
public:
  static constexpr double kWidth = 800.0;
  static constexpr double kHeight = 600.0;

  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool equal_aspect = false;

  void add(Series s)
  {
    if (s.x.size() != s.y.size()) throw InvalidArgument("svg::Plot: series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_x && !(s.x[i] > 0.0))) {
        throw InvalidArgument("svg::Plot: non-finite coordinate in series '" + s.label + "'");
      }
    }
    series_.push_back(std::move(s));
  }

  void render(std::ostream & os) const
  {
    double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
    for (const auto & s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double tx = tx_(s.x[i]);
        x0 = std::min(x0, tx);
        x1 = std::max(x1, tx);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
    }
    if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    double sx = pw / (x1 - x0);
    double sy = ph / (y1 - y0);
    if (equal_aspect) sx = sy = std::min(sx, sy);
    auto X = [&](double v) { return kLeft + (tx_(v) - x0) * sx; };
    auto Y = [&](double v) { return kHeight - kBottom - (v - y0) * sy; };

    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    text_(os, kWidth / 2, 24, title, "middle", 16);
    text_(os, kWidth / 2, kHeight - 12, x_label, "middle", 13);
    os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" font-family=\"sans-serif\" font-size=\"13\" "
       << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << escape_(y_label)
       << "</text>\n";

    for (int k = 0; k <= 4; ++k) {
      const double ty = y0 + (y1 - y0) * k / 4.0;
      text_(os, kLeft - 6, Y(ty) + 4, fmt_(ty), "end", 11);
      const double txv = x0 + (x1 - x0) * k / 4.0;
      const double label = log_x ? std::pow(10.0, txv) : txv;
      text_(os, kLeft + (txv - x0) * sx, kHeight - kBottom + 16, fmt_(label), "middle", 11);
    }

    for (const auto & s : series_) {
      if (s.x.empty()) continue;
      os << "<" << (s.closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << s.color
         << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) os << (i ? " " : "") << X(s.x[i]) << ',' << Y(s.y[i]);
      os << "\"/>\n";
      if (s.markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          os << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\"2.5\" fill=\"" << s.color
             << "\"/>\n";
        }
      }
    }

    double ly = kTop + 16;
    for (const auto & s : series_) {
      if (s.label.empty()) continue;
      os << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight - 126
         << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      text_(os, kWidth - kRight - 120, ly, s.label, "start", 12);
      ly += 16;
    }
    os << "</svg>\n";
  }

  std::string str() const
  {
    std::ostringstream os;
    render(os);
    return os.str();
  }

private:
  static constexpr double kLeft = 70.0;
  static constexpr double kRight = 20.0;
  static constexpr double kTop = 40.0;
  static constexpr double kBottom = 50.0;

  std::vector<Series> series_;

  double tx_(double v) const { return log_x ? std::log10(v) : v; }

  static std::string fmt_(double v)
  {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
  }

  static std::string escape_(const std::string & s)
  {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

  static void text_(std::ostream & os, double x, double y, const std::string & s, const char * anchor, int size)
  {
    os << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"" << size
       << "\" text-anchor=\"" << anchor << "\">" << escape_(s) << "</text>\n";
  }
};

}  // namespace hullcert::svg

#endif  // HULLCERT_SVG_HPP_
