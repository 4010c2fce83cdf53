#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "spl/core/errors.hpp"

namespace spl {

struct PlotStyle {
  int width = 640;
  int height = 400;
  std::string density_color = "#1f4fb4";
  std::string pressure_color = "#000000";
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Round tick positions covering [lo, hi]: steps of 1, 2, 2.5 or 5 times a power of ten.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double f : {1.0, 2.0, 2.5, 5.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> out;
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0)
    out.push_back(std::abs(k) < 0.5 ? 0.0 : k * step);
  return out;
}

}  // namespace detail

/**
 * @brief Self-contained SVG with density on a fixed [0, 1.05] left axis and
 * pressure (dashed) on an auto-scaled right axis.
 */
inline std::string twin_axis_svg(const std::vector<double>& x, const std::vector<double>& density,
                                 const std::vector<double>& pressure, const std::string& title, const PlotStyle& style = {}) {
  if (x.size() < 2 || density.size() != x.size() || pressure.size() != x.size())
    throw InvalidParameter("plot needs >= 2 points and equal column lengths");
  using detail::fmt;
  const double W = style.width, H = style.height;
  const double left = 64, right = 64, top = 36, bottom = 48;
  const double pw = W - left - right, ph = H - top - bottom;
  const double x0 = x.front(), x1 = x.back();
  const double d_max = 1.05;
  double p_top = 0.0;
  for (double p : pressure)
    if (std::isfinite(p)) p_top = std::max(p_top, p);
  p_top = p_top > 0.0 ? 1.05 * p_top : 1.0;

  auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v, double top_value) { return top + ph - std::clamp(v / top_value, 0.0, 1.0) * ph; };
  auto polyline = [&](const std::vector<double>& y, double top_value) {
    std::string pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) pts += ' ';
      pts += fmt("%.2f", sx(x[i])) + "," + fmt("%.2f", sy(y[i], top_value));
    }
    return pts;
  };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
       "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
       std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt("%.0f", W) + "\" height=\"" + fmt("%.0f", H) + "\" fill=\"#ffffff\"/>\n";
  s += "<text x=\"" + fmt("%.1f", W / 2) + "\" y=\"22\" text-anchor=\"middle\">" + detail::escape_xml(title) + "</text>\n";
  s += "<rect x=\"" + fmt("%.1f", left) + "\" y=\"" + fmt("%.1f", top) + "\" width=\"" + fmt("%.1f", pw) + "\" height=\"" +
       fmt("%.1f", ph) + "\" fill=\"none\" stroke=\"#555555\"/>\n";

  auto tick = [&](double x1_, double y1_, double x2_, double y2_) {
    return "<line x1=\"" + fmt("%.2f", x1_) + "\" y1=\"" + fmt("%.2f", y1_) + "\" x2=\"" + fmt("%.2f", x2_) + "\" y2=\"" +
           fmt("%.2f", y2_) + "\" stroke=\"#555555\"/>\n";
  };
  for (double xv : detail::nice_ticks(x0, x1)) {
    const double px = sx(xv);
    s += tick(px, top + ph, px, top + ph + 5);
    s += "<text x=\"" + fmt("%.2f", px) + "\" y=\"" + fmt("%.2f", top + ph + 18) + "\" text-anchor=\"middle\">" +
         fmt("%g", xv) + "</text>\n";
  }
  for (double dv : detail::nice_ticks(0.0, d_max)) {
    const double py = sy(dv, d_max);
    s += tick(left - 5, py, left, py);
    s += "<text x=\"" + fmt("%.2f", left - 8) + "\" y=\"" + fmt("%.2f", py + 4) + "\" text-anchor=\"end\" fill=\"" +
         style.density_color + "\">" + fmt("%g", dv) + "</text>\n";
  }
  for (double pv : detail::nice_ticks(0.0, p_top)) {
    const double py = sy(pv, p_top);
    s += tick(left + pw, py, left + pw + 5, py);
    s += "<text x=\"" + fmt("%.2f", left + pw + 8) + "\" y=\"" + fmt("%.2f", py + 4) + "\" text-anchor=\"start\">" +
         fmt("%g", pv) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", H - 8) + "\" text-anchor=\"middle\">x</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%.1f", top + ph / 2) + "\" text-anchor=\"middle\" fill=\"" + style.density_color +
       "\" transform=\"rotate(-90 16 " + fmt("%.1f", top + ph / 2) + ")\">density</text>\n";
  s += "<text x=\"" + fmt("%.1f", W - 12) + "\" y=\"" + fmt("%.1f", top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(90 " +
       fmt("%.1f", W - 12) + " " + fmt("%.1f", top + ph / 2) + ")\">pressure</text>\n";
  s += "<polyline fill=\"none\" stroke=\"" + style.density_color + "\" stroke-width=\"1.8\" points=\"" + polyline(density, d_max) +
       "\"/>\n";
  s += "<polyline fill=\"none\" stroke=\"" + style.pressure_color +
       "\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\" points=\"" + polyline(pressure, p_top) + "\"/>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace spl
