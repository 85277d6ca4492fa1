#include "pwsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pwsim/errors.hpp"

namespace pwsim::svg {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

struct Range {
  double lo = 0.0, hi = 1.0;
  double span() const { return hi - lo; }
};

Range fit_range(std::optional<double> fixed_lo, std::optional<double> fixed_hi,
                const std::vector<const std::vector<double>*>& columns,
                const std::vector<double>& extra) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* col : columns)
    for (double v : *col)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  for (double v : extra)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    double pad = std::max(1e-12, std::abs(lo) * 0.1 + 0.5);
    lo -= pad;
    hi += pad;
  } else {
    double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  Range r{lo, hi};
  if (fixed_lo) r.lo = *fixed_lo;
  if (fixed_hi) r.hi = *fixed_hi;
  if (r.span() <= 0) r = {r.lo - 0.5, r.lo + 0.5};
  return r;
}

// "Nice" tick spacing: 1, 2, or 5 times a power of ten.
std::vector<double> ticks(const Range& r, int target = 6) {
  double raw = r.span() / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  step *= mag;
  std::vector<double> out;
  double t = std::ceil(r.lo / step) * step;
  for (; t <= r.hi + step * 1e-9; t += step) {
    double v = (std::abs(t) < step * 1e-9) ? 0.0 : t;
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::string render(const Figure& fig) {
  const double W = fig.width_px, H = fig.height_px;
  const double ml = 64, mr = 18, mt = fig.title.empty() ? 18 : 40, mb = 48;
  const double pw = W - ml - mr, ph = H - mt - mb;

  std::vector<const std::vector<double>*> xs, ys;
  std::vector<double> mx, my;
  for (const auto& s : fig.series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  for (const auto& m : fig.markers) {
    mx.push_back(m.x);
    my.push_back(m.y);
  }
  Range rx = fit_range(fig.x_min, fig.x_max, xs, mx);
  Range ry = fit_range(fig.y_min, fig.y_max, ys, my);

  auto px = [&](double x) { return ml + (x - rx.lo) / rx.span() * pw; };
  auto py = [&](double y) { return mt + (ry.hi - y) / ry.span() * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W)
    << "\" height=\"" << fmt(H) << "\" viewBox=\"0 0 " << fmt(W) << " "
    << fmt(H) << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  if (!fig.title.empty())
    o << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(fig.title)
      << "</text>\n";

  // Frame and grid.
  o << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\""
    << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (double t : ticks(rx)) {
    double X = px(t);
    if (X < ml - 0.5 || X > ml + pw + 0.5) continue;
    o << "<line x1=\"" << fmt(X) << "\" y1=\"" << fmt(mt) << "\" x2=\""
      << fmt(X) << "\" y2=\"" << fmt(mt + ph)
      << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n"
      << "<text x=\"" << fmt(X) << "\" y=\"" << fmt(mt + ph + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << fmt(t) << "</text>\n";
  }
  for (double t : ticks(ry)) {
    double Y = py(t);
    if (Y < mt - 0.5 || Y > mt + ph + 0.5) continue;
    o << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(Y) << "\" x2=\""
      << fmt(ml + pw) << "\" y2=\"" << fmt(Y)
      << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n"
      << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(Y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << fmt(t) << "</text>\n";
  }
  if (!fig.x_label.empty())
    o << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << escape(fig.x_label) << "</text>\n";
  if (!fig.y_label.empty())
    o << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 16 "
      << fmt(mt + ph / 2) << ")\">" << escape(fig.y_label) << "</text>\n";

  // Clip data to the plot frame.
  o << "<clipPath id=\"plot\"><rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt)
    << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";

  for (const auto& s : fig.series) {
    size_t n = std::min(s.x.size(), s.y.size());
    if (n < 2) continue;
    o << "<polyline fill=\"none\" stroke=\"" << escape(s.color)
      << "\" stroke-width=\"" << fmt(s.width) << "\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    for (size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
      if (i + 1 < n) o << " ";
    }
    o << "\"/>\n";
  }
  for (const auto& m : fig.markers) {
    o << "<circle cx=\"" << fmt(px(m.x)) << "\" cy=\"" << fmt(py(m.y))
      << "\" r=\"" << fmt(m.radius) << "\" stroke=\"" << escape(m.color)
      << "\" stroke-width=\"1.2\" fill=\""
      << (m.filled ? escape(m.color) : std::string("none")) << "\"/>\n";
    if (!m.label.empty())
      o << "<text x=\"" << fmt(px(m.x) + m.radius + 4) << "\" y=\""
        << fmt(py(m.y) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(m.label) << "</text>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

void write_file(const Figure& fig, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << render(fig);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace pwsim::svg
