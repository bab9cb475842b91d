#include "tfe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tfe/stats.hpp"

namespace tfe::svg {

namespace {

constexpr double width = 640.0;
constexpr double height = 440.0;
constexpr double left = 70.0;
constexpr double right = 20.0;
constexpr double top = 40.0;
constexpr double bottom = 55.0;

std::string num(double v) {
  // Two decimals are plenty for pixel coordinates.
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  [[nodiscard]] bool empty() const { return !(lo <= hi); }
  void pad(double frac) {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double w = hi - lo;
    lo -= frac * w;
    hi += frac * w;
  }
};

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  [[nodiscard]] double px(double v) const {
    return left + (v - x_.lo) / (x_.hi - x_.lo) * (width - left - right);
  }
  [[nodiscard]] double py(double v) const {
    return height - bottom - (v - y_.lo) / (y_.hi - y_.lo) * (height - top - bottom);
  }

 private:
  Range x_;
  Range y_;
};

void header(std::ostringstream& os, const std::string& title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n"
     << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"15\">"
     << escape(title) << "</text>\n";
}

// Frame, ticks, and labels. Tick values are in transformed coordinates;
// `logx`/`logy` only change the label text.
void frame(std::ostringstream& os, const Canvas& c, Range xr, Range yr, const Axes& axes) {
  const double x0 = left, x1 = width - right, y0 = top, y1 = height - bottom;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
     << "\" height=\"" << num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto ticks = [](Range r) {
    std::vector<double> out;
    const double span = r.hi - r.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      step = m * mag;
      if (span / step <= 6.0) break;
    }
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-12 * span; v += step) {
      out.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    }
    return out;
  };
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v : ticks(xr)) {
    const double x = c.px(v);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(y1 + 5) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(x) << "\" y=\"" << num(y1 + 18) << "\" text-anchor=\"middle\">"
       << escape(tick_label(axes.logx ? std::pow(10.0, v) : v)) << "</text>\n";
  }
  for (double v : ticks(yr)) {
    const double y = c.py(v);
    os << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0)
       << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
       << escape(tick_label(axes.logy ? std::pow(10.0, v) : v)) << "</text>\n";
  }
  os << "</g>\n"
     << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(height - 12)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape(axes.xlabel) << "</text>\n"
     << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << num((y0 + y1) / 2) << ")\">" << escape(axes.ylabel) << "</text>\n";
}

void legend(std::ostringstream& os, std::span<const Series> series) {
  double y = top + 16;
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const Series& s : series) {
    if (s.label.empty()) continue;
    const double x = width - right - 190;
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(x + 20)
       << "\" y2=\"" << num(y - 4) << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n"
       << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y) << "\">" << escape(s.label)
       << "</text>\n";
    y += 16;
  }
  os << "</g>\n";
}

}  // namespace

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string plot(const Axes& axes, std::span<const Series> series) {
  auto tx = [&](double v) { return axes.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return axes.logy ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!axes.logx || x > 0.0) &&
           (!axes.logy || y > 0.0);
  };
  Range xr, yr;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      xr.add(tx(s.x[i]));
      yr.add(ty(s.y[i]));
    }
  }
  xr.pad(0.05);
  yr.pad(0.08);
  const Canvas c(xr, yr);

  std::ostringstream os;
  header(os, axes.title);
  frame(os, c, xr, yr, axes);
  for (const Series& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.markers) {
      os << "<g fill=\"" << escape(s.color) << "\">\n";
      for (std::size_t i = 0; i < n; ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        os << "<circle cx=\"" << num(c.px(tx(s.x[i]))) << "\" cy=\"" << num(c.py(ty(s.y[i])))
           << "\" r=\"3\"/>\n";
      }
      os << "</g>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << escape(s.color) << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!usable(s.x[i], s.y[i])) continue;
        os << (first ? "" : " ") << num(c.px(tx(s.x[i]))) << ',' << num(c.py(ty(s.y[i])));
        first = false;
      }
      os << "\"/>\n";
    }
  }
  legend(os, series);
  os << "</svg>\n";
  return os.str();
}

std::string histogram_with_normal(const std::string& title, std::span<const double> sample,
                                  std::size_t bins) {
  std::vector<double> x;
  for (double v : sample) {
    if (std::isfinite(v)) x.push_back(v);
  }
  bins = std::max<std::size_t>(bins, 1);
  Range xr;
  for (double v : x) xr.add(v);
  xr.add(-3.5);
  xr.add(3.5);
  const double w = (xr.hi - xr.lo) / static_cast<double>(bins);
  std::vector<double> density(bins, 0.0);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - xr.lo) / w);
    density[std::min(b, bins - 1)] += 1.0;
  }
  for (double& d : density) d /= std::max<double>(1.0, static_cast<double>(x.size())) * w;

  constexpr std::size_t curve_points = 200;
  Series curve{"N(0, 1) density", {}, {}, "#d62728", false, false};
  for (std::size_t i = 0; i <= curve_points; ++i) {
    const double v = xr.lo + (xr.hi - xr.lo) * static_cast<double>(i) / curve_points;
    curve.x.push_back(v);
    curve.y.push_back(std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi));
  }
  Range yr;
  yr.add(0.0);
  for (double d : density) yr.add(d);
  for (double d : curve.y) yr.add(d);
  yr.hi *= 1.08;
  Range xpad = xr;
  const Canvas c(xpad, yr);
  const Axes axes{title, "normalized statistic", "density", false, false};

  std::ostringstream os;
  header(os, title);
  frame(os, c, xpad, yr, axes);
  os << "<g fill=\"#9ecae1\" stroke=\"#3182bd\">\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double x0 = c.px(xr.lo + w * static_cast<double>(b));
    const double x1 = c.px(xr.lo + w * static_cast<double>(b + 1));
    const double y0 = c.py(density[b]);
    os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
       << "\" height=\"" << num(c.py(0.0) - y0) << "\"/>\n";
  }
  os << "</g>\n<polyline fill=\"none\" stroke=\"" << curve.color
     << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    os << (i ? " " : "") << num(c.px(curve.x[i])) << ',' << num(c.py(curve.y[i]));
  }
  os << "\"/>\n";
  legend(os, std::span<const Series>(&curve, 1));
  os << "</svg>\n";
  return os.str();
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> sample) {
  std::vector<double> x;
  for (double v : sample) {
    if (std::isfinite(v)) x.push_back(v);
  }
  std::sort(x.begin(), x.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / n), x[i]);
  }
  return out;
}

std::string qq_plot(const std::string& title, std::span<const double> sample) {
  const auto pts = qq_points(sample);
  Series data{"sample", {}, {}, "#1f77b4", true, false};
  for (const auto& [q, v] : pts) {
    data.x.push_back(q);
    data.y.push_back(v);
  }
  double lo = -3.0, hi = 3.0;
  if (!pts.empty()) {
    lo = std::min(pts.front().first, pts.front().second);
    hi = std::max(pts.back().first, pts.back().second);
  }
  const Series diag{"y = x", {lo, hi}, {lo, hi}, "#d62728", false, true};
  const std::vector<Series> series = {data, diag};
  return plot({title, "standard normal quantile", "sample quantile", false, false}, series);
}

}  // namespace tfe::svg
