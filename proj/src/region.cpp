#include "hartree/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hartree/io.hpp"
#include "hartree/sampling.hpp"

namespace hartree {

std::vector<RegionSample> region_grid(int n, int resolution) {
  if (n < 3) throw std::invalid_argument("region diagrams need n >= 3");
  if (resolution < 16) throw std::invalid_argument("resolution must be at least 16");
  const Rational lo = range_alpha_lower(n);
  const Rational span = Rational(n) - lo;
  std::vector<RegionSample> out;
  out.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  for (int i = 1; i < resolution; ++i) {
    const Rational alpha = lo + span * Rational(i, resolution);
    const Rational top = range_upper_bound(n, alpha);
    for (int j = 1; j <= resolution; ++j) {
      const Rational b = top * Rational(j, resolution);
      out.push_back({alpha, b, classify(ParamPoint(n, alpha, b))});
    }
  }
  return out;
}

std::string region_csv(const std::vector<RegionSample>& samples) {
  std::ostringstream out;
  out << "# hartree-region-csv v1\n";
  out << "alpha,b,alpha_value,b_value,label\n";
  for (const RegionSample& s : samples) {
    out << s.alpha << ',' << s.b << ',' << format_double(s.alpha.to_double()) << ','
        << format_double(s.b.to_double()) << ',' << to_string(s.label) << '\n';
  }
  return out.str();
}

namespace {

const char* fill_for(RegionLabel label) {
  switch (label) {
    case RegionLabel::ThisPaper: return "#4c78a8";
    case RegionLabel::Kim: return "#f58518";
    case RegionLabel::GuzmanXu3d: return "#54a24b";
    case RegionLabel::SaanouniPeng3d: return "#b279a2";
    case RegionLabel::Open: return "#e45756";
    case RegionLabel::OutOfRange: return "#dddddd";
  }
  return "#000000";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string region_svg(int n, const std::vector<RegionSample>& samples, int resolution) {
  const double lo = range_alpha_lower(n).to_double();
  const double hi = static_cast<double>(n);
  const double b_max = 2.0;  // (alpha - n + 4)/2 at alpha = n
  const double width = 640.0;
  const double height = 480.0;
  const double margin = 50.0;
  auto px = [&](double alpha) { return margin + (alpha - lo) / (hi - lo) * (width - 2 * margin); };
  auto py = [&](double b) { return height - margin - b / b_max * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<title>Parameter regions, n = " << n << "</title>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Cells: each sample colours the box below it down to the previous b.
  const double cell_w = (width - 2 * margin) / resolution;
  svg << "<g id=\"cells\" stroke=\"none\">\n";
  for (const RegionSample& s : samples) {
    const double a = s.alpha.to_double();
    const double b = s.b.to_double();
    const double top = (a - n + 4.0) / 2.0;
    const double cell_h = top / resolution / b_max * (height - 2 * margin);
    svg << "<rect x=\"" << num(px(a) - cell_w / 2) << "\" y=\"" << num(py(b)) << "\" width=\"" << num(cell_w)
        << "\" height=\"" << num(cell_h) << "\" fill=\"" << fill_for(s.label) << "\" fill-opacity=\"0.55\"/>\n";
  }
  svg << "</g>\n";

  auto polyline = [&](const std::string& id, const std::string& colour, const std::string& dash, double a0, double a1,
                      const auto& curve) {
    svg << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"";
    if (!dash.empty()) svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    const int steps = 64;
    for (int k = 0; k <= steps; ++k) {
      const double a = a0 + (a1 - a0) * k / steps;
      svg << num(px(a)) << ',' << num(py(curve(a))) << (k == steps ? "" : " ");
    }
    svg << "\"/>\n";
  };
  polyline("range-edge", "#000000", "", lo, hi, [&](double a) { return (a - n + 4.0) / 2.0; });
  polyline("theorem-edge", "#1f3b73", "6,3", lo, hi, [&](double a) { return (a - n + 4.0) / n; });
  const double kim_lo = kim_alpha_lower(n).to_double();
  const double shift = kim_lower_line(n, Rational(0)).to_double();
  polyline("kim-line", "#a64d00", "2,3", kim_lo, hi, [&](double a) { return std::max(0.0, a / 2.0 + shift); });

  // Axes.
  svg << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << width - margin << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << py(0) << "\" x2=\"" << margin << "\" y2=\"" << margin
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" font-size=\"14\">alpha</text>\n";
  svg << "<text x=\"12\" y=\"" << height / 2 << "\" font-size=\"14\">b</text>\n";
  svg << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">" << num(lo)
      << "</text>\n";
  svg << "<text x=\"" << width - margin - 10 << "\" y=\"" << height - margin + 16 << "\" font-size=\"11\">" << n
      << "</text>\n";

  svg << "<g id=\"landmarks\">\n";
  for (const LandmarkPoint& p : landmarks(n)) {
    const double a = p.alpha.to_double();
    const double b = p.b.to_double();
    svg << "<g id=\"landmark-" << p.name << "\" data-alpha=\"" << p.alpha.str() << "\" data-b=\"" << p.b.str()
        << "\">";
    svg << "<circle cx=\"" << num(px(a)) << "\" cy=\"" << num(py(b)) << "\" r=\"4\" fill=\"black\"/>";
    svg << "<text x=\"" << num(px(a) + 6) << "\" y=\"" << num(py(b) - 6) << "\" font-size=\"13\">" << p.name
        << "</text></g>\n";
  }
  svg << "</g>\n";

  svg << "<g id=\"legend\" font-size=\"11\">\n";
  int row = 0;
  for (RegionLabel label : {RegionLabel::ThisPaper, RegionLabel::Kim, RegionLabel::GuzmanXu3d,
                            RegionLabel::SaanouniPeng3d, RegionLabel::Open}) {
    const double y = margin + 14.0 * row++;
    svg << "<rect x=\"" << margin + 8 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
        << fill_for(label) << "\"/><text x=\"" << margin + 22 << "\" y=\"" << y << "\">" << to_string(label)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::size_t CoverageReport::open_count() const {
  const auto it = counts.find(RegionLabel::Open);
  return it == counts.end() ? 0 : it->second;
}

CoverageReport verify_coverage(int n, std::size_t samples, std::size_t boundary_points, std::uint64_t seed) {
  CoverageReport report;
  report.n = n;
  auto record = [&report](const ParamPoint& pt) {
    const RegionLabel label = classify(pt);
    ++report.counts[label];
    if (label == RegionLabel::Open && report.open_points.size() < 8) report.open_points.push_back(pt);
  };
  for (const ParamPoint& pt : sample_in_range(n, samples, seed)) {
    record(pt);
    ++report.interior_samples;
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Rational lo = range_alpha_lower(n);
  const Rational top = Rational(n);
  for (std::size_t i = 0; i < boundary_points; ++i) {
    const Rational alpha = random_rational_between(lo, top, rng);
    const ParamPoint on_range(n, alpha, range_upper_bound(n, alpha));
    const ParamPoint on_theorem(n, alpha, theorem_upper_bound(n, alpha));
    // The Sobolev-Lorentz line is irrational; bracket it at 1e-9.
    const double kim = kim_lower_line(n, alpha).to_double();
    const std::int64_t scale = 1000000000;
    const auto below = static_cast<std::int64_t>(std::floor(kim * static_cast<double>(scale)));
    const ParamPoint under_kim(n, alpha, Rational(below, scale));
    const ParamPoint over_kim(n, alpha, Rational(below + 1, scale));
    for (const ParamPoint& pt : {on_range, on_theorem, under_kim, over_kim}) {
      if (!in_range(pt)) continue;
      record(pt);
      ++report.boundary_samples;
    }
  }
  return report;
}

}  // namespace hartree
