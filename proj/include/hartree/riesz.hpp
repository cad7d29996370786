#pragma once

#include <array>
#include <memory>

#include "hartree/grid.hpp"

namespace hartree {

/// c(n, alpha) = Gamma((n - alpha)/2) / (Gamma(alpha/2) pi^{n/2} 2^alpha), the
/// normalisation for which I_alpha = c |x|^{alpha - n} has symbol |xi|^{-alpha}
/// under f^(xi) = int f(x) e^{-i x.xi} dx.
double riesz_constant(int n, double alpha);

struct RieszSpec {
  int n = 3;
  double alpha = 2.0;
  double constant = 0.0;

  /// Validates 0 < alpha < n and fills in the constant.
  static RieszSpec make(int n, double alpha);
};

/// How the kernel is represented on the periodic grid.
enum class KernelMode {
  /// Symbol |xi|^{-alpha} with the zero mode set to 0 (screened by the mean).
  PeriodicMeanZero,
  /// Kernel truncated at radius L. Its exact transform is used, so the
  /// discrete convolution equals the free-space convolution at targets within
  /// L/2 of the origin whenever the density is supported there too.
  FreeSpaceTruncated,
};

const char* to_string(KernelMode mode);
KernelMode kernel_mode_from_string(const char* text);

/// Convolution with the Riesz kernel on a fixed grid. The half-spectrum
/// symbol is built once per operator.
class RieszOperator {
 public:
  RieszOperator(const GridSpec& grid, const RieszSpec& spec, KernelMode mode = KernelMode::FreeSpaceTruncated);

  [[nodiscard]] RealVector apply(const RealVector& density) const;

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const RieszSpec& spec() const { return spec_; }
  [[nodiscard]] KernelMode mode() const { return mode_; }
  /// Kernel symbol on the half spectrum.
  [[nodiscard]] const RealVector& symbol() const { return symbol_; }

 private:
  GridSpec grid_;
  RieszSpec spec_;
  KernelMode mode_;
  RealVector symbol_;
};

/// One-shot convenience wrapper around RieszOperator.
RealVector riesz_convolve(const RieszSpec& spec, const GridSpec& grid, const RealVector& density,
                          KernelMode mode = KernelMode::FreeSpaceTruncated);

/// Fourier transform of c |x|^{alpha - n} 1_{|x| < R} at |xi| = k, for n in
/// {1, 2, 3}.
double truncated_kernel_symbol(int n, double alpha, double k, double radius);

/// |x|^exponent sampled on the grid. Only the origin cell is regularised, to
/// (|x|^2 + delta^2)^{exponent/2}; delta defaults to h/2 when negative.
RealVector regularized_power_weight(const GridSpec& grid, double exponent, double delta = -1.0);

/// Epstein zeta function of the integer lattice, sum' |j|^{-s} over
/// j in Z^dim \ {0}, analytically continued; 0 < s < dim.
double lattice_zeta(int dim, double s);

/// Origin regularisation delta for which the punctured lattice sum of
/// |x|^exponent g(x), with delta^exponent at the origin, matches the integral
/// to O(h^{dim + exponent + 2}). Requires -dim < exponent < 0.
double lattice_corrected_delta(int dim, double exponent, double spacing);

/// Probe functions with closed-form norms.
struct TestFunction {
  enum class Kind { Gaussian, DilatedGaussian, BumpProduct };

  Kind kind = Kind::Gaussian;
  /// Gaussian standard width sigma, or the half-width of each bump factor.
  double width = 1.0;
  /// DilatedGaussian evaluates the Gaussian at dilation * (x - center).
  double dilation = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};

  static TestFunction gaussian(double sigma);
  static TestFunction dilated_gaussian(double sigma, double lambda);
  static TestFunction bump_product(double half_width);

  [[nodiscard]] double value(const std::array<double, 3>& x, int dim) const;
  [[nodiscard]] std::array<double, 3> gradient(const std::array<double, 3>& x, int dim) const;
  /// ||f||_{L^p(R^dim)} in closed form.
  [[nodiscard]] double lp_norm(double p, int dim) const;
  /// ||grad f||_{L^2(R^dim)} in closed form.
  [[nodiscard]] double gradient_l2_norm(int dim) const;
  [[nodiscard]] RealVector sample(const GridSpec& grid) const;
};

/// ||f (I_alpha * g)||_q / (||f||_r ||g||_s) by grid quadrature. Requires
/// 1/r + 1/s = 1/q + alpha/n and 1 < q, r, s < inf.
double hls_ratio(const RieszSpec& spec, const GridSpec& grid, const RealVector& f, const RealVector& g, double q,
                 double r, double s, KernelMode mode = KernelMode::FreeSpaceTruncated);

/// || |x|^b f ||_q / ||grad f||_p with the weight regularised at the origin.
/// Requires 1 < p <= q < inf, -n/q < b <= 0 and -b - 1 = n/q - n/p.
double ckn_ratio(const Field& f, double p, double q, double b);

}  // namespace hartree
