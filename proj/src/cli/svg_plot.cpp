#include "vipr/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace vipr {
namespace {

constexpr double kPanelW = 360, kPanelH = 260, kLeft = 58, kRight = 14, kTop = 30, kBottom = 42;

std::string num(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range range_of(const std::vector<double>& v) {
  Range r{INFINITY, -INFINITY};
  for (double x : v)
    if (std::isfinite(x)) {
      r.lo = std::min(r.lo, x);
      r.hi = std::max(r.hi, x);
    }
  if (!(r.lo <= r.hi)) return {0.0, 1.0};
  if (r.hi - r.lo < 1e-12) {
    r.lo -= 0.5;
    r.hi += 0.5;
  }
  return r;
}

class Panel {
 public:
  Panel(std::ostringstream& out, double x0, Range xr, Range yr)
      : out_(out), x0_(x0), xr_(xr), yr_(yr) {}

  double px(double x) const {
    return x0_ + kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kPanelW - kLeft - kRight);
  }
  double py(double y) const {
    return kTop + (1.0 - (y - yr_.lo) / (yr_.hi - yr_.lo)) * (kPanelH - kTop - kBottom);
  }

  void frame(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    const double l = px(xr_.lo), r = px(xr_.hi), t = py(yr_.hi), b = py(yr_.lo);
    out_ << "<rect x='" << num(l) << "' y='" << num(t) << "' width='" << num(r - l)
         << "' height='" << num(b - t) << "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = xr_.lo + (xr_.hi - xr_.lo) * i / 4, yv = yr_.lo + (yr_.hi - yr_.lo) * i / 4;
      out_ << "<text x='" << num(px(xv)) << "' y='" << num(b + 14)
           << "' font-size='10' text-anchor='middle'>" << num(xv) << "</text>\n";
      out_ << "<text x='" << num(l - 4) << "' y='" << num(py(yv) + 3)
           << "' font-size='10' text-anchor='end'>" << num(yv) << "</text>\n";
    }
    out_ << "<text x='" << num((l + r) / 2) << "' y='18' font-size='13' text-anchor='middle'>"
         << title << "</text>\n";
    out_ << "<text x='" << num((l + r) / 2) << "' y='" << num(b + 32)
         << "' font-size='11' text-anchor='middle'>" << xlabel << "</text>\n";
    out_ << "<text transform='translate(" << num(x0_ + 12) << "," << num((t + b) / 2)
         << ") rotate(-90)' font-size='11' text-anchor='middle'>" << ylabel << "</text>\n";
  }

 private:
  std::ostringstream& out_;
  double x0_;
  Range xr_, yr_;
};

void histogram(std::ostringstream& out, double x0, const std::vector<double>& values,
               const std::string& title, const std::string& xlabel) {
  const Range xr = range_of(values);
  const int bins = 30;
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    int b = static_cast<int>((v - xr.lo) / (xr.hi - xr.lo) * bins);
    counts[std::clamp(b, 0, bins - 1)] += 1.0;
  }
  // normalized to a density so panels with different sample counts compare
  const double width = (xr.hi - xr.lo) / bins;
  double n = 0.0;
  for (double c : counts) n += c;
  for (auto& c : counts) c = n > 0 ? c / (n * width) : 0.0;
  const double top = std::max(*std::max_element(counts.begin(), counts.end()), 1e-12);
  Panel p(out, x0, xr, {0.0, top * 1.05});
  for (int b = 0; b < bins; ++b) {
    const double l = p.px(xr.lo + b * width), r = p.px(xr.lo + (b + 1) * width);
    out << "<rect x='" << num(l) << "' y='" << num(p.py(counts[b])) << "' width='"
        << num(std::max(r - l - 0.5, 0.5)) << "' height='" << num(p.py(0.0) - p.py(counts[b]))
        << "' fill='#5b8cc0'/>\n";
  }
  p.frame(title, xlabel, "density");
}

}  // namespace

std::string render_report_svg(const std::vector<TraceRecord>& trace,
                              const std::vector<double>& tree_lengths,
                              const std::vector<double>& log_likelihoods) {
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(3 * kPanelW) << "' height='"
      << num(kPanelH) << "' font-family='sans-serif'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";

  std::vector<double> iters, mll;
  for (const auto& r : trace) {
    iters.push_back(static_cast<double>(r.iteration));
    mll.push_back(r.mll);
  }
  Panel p(out, 0.0, range_of(iters), range_of(mll));
  std::string points;
  for (std::size_t i = 0; i < iters.size(); ++i)
    if (std::isfinite(mll[i])) points += num(p.px(iters[i])) + "," + num(p.py(mll[i])) + " ";
  out << "<polyline fill='none' stroke='#c0392b' stroke-width='1.5' points='" << points
      << "'/>\n";
  p.frame("MLL estimate", "iteration", "log p(Y)");

  histogram(out, kPanelW, tree_lengths, "Tree length", "total branch length");
  histogram(out, 2 * kPanelW, log_likelihoods, "Tree log-likelihood", "log p(Y | tree)");
  out << "</svg>\n";
  return out.str();
}

}  // namespace vipr
