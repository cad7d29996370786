#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of them touch the FFT path: they integrate in real space.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hartree::oracle {

using Point = std::array<double, 3>;
using Density = std::function<double(const Point&)>;

/// c int |y|^{alpha - 3} g(x - y) dy in three dimensions, in polar
/// coordinates centred on the target. `reach` bounds |x - y| over the support
/// of g. The radial variable is t = rho^alpha, which absorbs the kernel's
/// rho^{alpha - 1} factor.
inline double riesz_polar_3d(const Density& g, double alpha, double constant, const Point& x, double reach,
                             int radial_panels = 12, int polar_panels = 6, int azimuth_points = 128) {
  using boost::math::quadrature::gauss;
  const double t_max = std::pow(reach, alpha);
  const double dphi = 2.0 * M_PI / azimuth_points;
  auto sphere_mean = [&](double rho) {
    double total = 0.0;
    const double mu_width = 2.0 / polar_panels;
    for (int pm = 0; pm < polar_panels; ++pm) {
      const double a = -1.0 + pm * mu_width;
      total += gauss<double, 20>::integrate(
          [&](double mu) {
            const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            double ring = 0.0;
            for (int k = 0; k < azimuth_points; ++k) {
              const double phi = (k + 0.5) * dphi;
              const Point y{x[0] + rho * s * std::cos(phi), x[1] + rho * s * std::sin(phi), x[2] + rho * mu};
              ring += g(y);
            }
            return ring * dphi;
          },
          a, a + mu_width);
    }
    return total;
  };
  double sum = 0.0;
  const double width = t_max / radial_panels;
  for (int p = 0; p < radial_panels; ++p) {
    const double a = p * width;
    sum += gauss<double, 20>::integrate([&](double t) { return sphere_mean(std::pow(t, 1.0 / alpha)); }, a,
                                        a + width);
  }
  return constant * sum / alpha;
}

/// Newtonian potential (alpha = 2, n = 3, constant 1/(4 pi)) of a radial
/// density rho(s): (1/r) int_0^r rho s^2 ds + int_r^inf rho s ds.
inline double newton_radial(const std::function<double(double)>& rho, double r, double cutoff) {
  using boost::math::quadrature::gauss_kronrod;
  auto panelled = [&](const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.25)));
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) total += gauss_kronrod<double, 31>::integrate(f, a + i * w, a + (i + 1) * w);
    return total;
  };
  const double outer = panelled([&](double s) { return rho(s) * s; }, r, cutoff);
  if (r == 0.0) return outer;
  const double inner = panelled([&](double s) { return rho(s) * s * s; }, 0.0, r);
  return inner / r + outer;
}

/// I_2 * exp(-|x|^2 / (2 sigma^2)) in three dimensions.
inline double gaussian_newton_potential(double sigma, double r) {
  if (r == 0.0) return sigma * sigma;
  return sigma * sigma * sigma * std::sqrt(M_PI / 2.0) * std::erf(r / (sigma * std::sqrt(2.0))) / r;
}

}  // namespace hartree::oracle
