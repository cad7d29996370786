#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hartree/exponent_core.hpp"

namespace hartree {

struct RegionSample {
  Rational alpha;
  Rational b;
  RegionLabel label;
};

/// Rational lattice over the admissible range of dimension n:
/// alpha = lo + (n - lo) i / resolution for 0 < i < resolution and
/// b = (alpha - n + 4)/2 * j / resolution for 0 < j <= resolution.
/// Every sample is in range by construction. Requires n >= 3 and
/// resolution >= 16.
std::vector<RegionSample> region_grid(int n, int resolution);

/// "# hartree-region-csv v1" then alpha,b,alpha_value,b_value,label.
std::string region_csv(const std::vector<RegionSample>& samples);

/// Region diagram: one shaded cell per sample, the range edge, the theorem
/// edge, the Sobolev-Lorentz line and the captioned landmarks.
std::string region_svg(int n, const std::vector<RegionSample>& samples, int resolution);

struct CoverageReport {
  int n = 0;
  std::size_t interior_samples = 0;
  std::size_t boundary_samples = 0;
  std::map<RegionLabel, std::size_t> counts;
  /// First few points labelled Open.
  std::vector<ParamPoint> open_points;

  [[nodiscard]] std::size_t open_count() const;
};

/// Labels `samples` random in-range points, then for `boundary_points`
/// random alphas the points on the range edge, on the theorem edge and just
/// either side of the Sobolev-Lorentz line. Out-of-range points are skipped.
CoverageReport verify_coverage(int n, std::size_t samples, std::size_t boundary_points, std::uint64_t seed);

}  // namespace hartree
