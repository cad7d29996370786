#include "hartree/riesz.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "hartree/fft.hpp"

namespace hartree {

double riesz_constant(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("riesz_constant: n must be >= 1");
  if (!(alpha > 0.0 && alpha < n)) throw std::invalid_argument("riesz_constant: alpha must lie in (0, n)");
  return std::tgamma((n - alpha) / 2.0) /
         (std::tgamma(alpha / 2.0) * std::pow(M_PI, n / 2.0) * std::pow(2.0, alpha));
}

RieszSpec RieszSpec::make(int n, double alpha) { return RieszSpec{n, alpha, riesz_constant(n, alpha)}; }

const char* to_string(KernelMode mode) {
  return mode == KernelMode::PeriodicMeanZero ? "periodic-mean-zero" : "free-space-truncated";
}

KernelMode kernel_mode_from_string(const char* text) {
  if (std::strcmp(text, "periodic-mean-zero") == 0) return KernelMode::PeriodicMeanZero;
  if (std::strcmp(text, "free-space-truncated") == 0) return KernelMode::FreeSpaceTruncated;
  throw std::invalid_argument(std::string("unknown kernel mode ") + text);
}

namespace {

// t^{alpha - n/2} J_{n/2 - 1}(t), the radial integrand of the truncated kernel.
double radial_integrand(int n, double alpha, double t) {
  switch (n) {
    case 1: return std::sqrt(2.0 / M_PI) * std::pow(t, alpha - 1.0) * std::cos(t);
    case 2: return std::pow(t, alpha - 1.0) * std::cyl_bessel_j(0.0, t);
    case 3: return std::sqrt(2.0 / M_PI) * std::pow(t, alpha - 2.0) * std::sin(t);
    default: throw std::invalid_argument("truncated kernel only implemented for n <= 3");
  }
}

// Power series of F(x) = int_0^x t^{alpha - n/2} J_nu(t) dt with nu = n/2 - 1.
double series_integral(int n, double alpha, double x) {
  const double nu = n / 2.0 - 1.0;
  double term = std::pow(x, alpha) / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
  double sum = term / alpha;
  for (int j = 1; j < 200; ++j) {
    term *= -x * x / (4.0 * j * (j + nu));
    const double add = term / (alpha + 2.0 * j);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

constexpr double kSeriesCutoff = 4.0;

// F at an ascending list of arguments, by the series up to the cutoff and
// panelled Gauss-Legendre beyond it.
std::vector<double> cumulative_integral(int n, double alpha, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  double last_x = 0.0;
  double last_f = 0.0;
  bool series_phase = true;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (series_phase && x <= kSeriesCutoff) {
      out[i] = x == 0.0 ? 0.0 : series_integral(n, alpha, x);
      last_x = x;
      last_f = out[i];
      continue;
    }
    if (series_phase) {
      series_phase = false;
      last_x = kSeriesCutoff;
      last_f = series_integral(n, alpha, kSeriesCutoff);
    }
    const int panels = std::max(1, static_cast<int>(std::ceil(x - last_x)));
    const double width = (x - last_x) / panels;
    for (int k = 0; k < panels; ++k) {
      const double a = last_x + k * width;
      last_f += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double t) { return radial_integrand(n, alpha, t); }, a, a + width);
    }
    last_x = x;
    out[i] = last_f;
  }
  return out;
}

double unit_sphere_area(int n) { return 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0); }

}  // namespace

double truncated_kernel_symbol(int n, double alpha, double k, double radius) {
  const double c = riesz_constant(n, alpha);
  if (k == 0.0) return c * unit_sphere_area(n) * std::pow(radius, alpha) / alpha;
  const double F = cumulative_integral(n, alpha, {k * radius})[0];
  return c * std::pow(2.0 * M_PI, n / 2.0) * std::pow(k, -alpha) * F;
}

RieszOperator::RieszOperator(const GridSpec& grid, const RieszSpec& spec, KernelMode mode)
    : grid_(grid), spec_(spec), mode_(mode) {
  if (spec.n != grid.dim) throw std::invalid_argument("Riesz spec dimension differs from the grid dimension");
  if (!(spec.alpha > 0.0 && spec.alpha < spec.n)) {
    throw std::invalid_argument("Riesz exponent must satisfy 0 < alpha < grid dimension");
  }
  const int half = grid.points / 2;
  const int max_s = grid.dim * half * half;
  std::vector<double> by_s(static_cast<std::size_t>(max_s) + 1, 0.0);
  const double L = grid.half_width;

  if (mode == KernelMode::FreeSpaceTruncated) {
    // |k| = pi sqrt(s) / L with s = |m|^2 an integer; with R = L the
    // argument k R = pi sqrt(s) does not depend on L.
    std::vector<double> xs(by_s.size());
    for (std::size_t s = 0; s < xs.size(); ++s) xs[s] = M_PI * std::sqrt(static_cast<double>(s));
    const std::vector<double> F = cumulative_integral(spec.n, spec.alpha, xs);
    const double prefactor = spec.constant * std::pow(2.0 * M_PI, spec.n / 2.0);
    by_s[0] = spec.constant * unit_sphere_area(spec.n) * std::pow(L, spec.alpha) / spec.alpha;
    for (std::size_t s = 1; s < by_s.size(); ++s) {
      const double k = xs[s] / L;
      by_s[s] = prefactor * std::pow(k, -spec.alpha) * F[s];
    }
  } else {
    for (std::size_t s = 1; s < by_s.size(); ++s) {
      by_s[s] = std::pow(M_PI * std::sqrt(static_cast<double>(s)) / L, -spec.alpha);
    }
  }

  symbol_.resize(grid.half_spectrum_size());
  grid.for_each_half_mode([&](std::size_t i, const std::array<double, 3>&, const std::array<int, 3>& m) {
    const int s = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    symbol_[i] = by_s[static_cast<std::size_t>(s)];
  });
}

RealVector RieszOperator::apply(const RealVector& density) const {
  if (density.size() != grid_.size()) throw std::invalid_argument("density size does not match grid");
  FftEngine fft(grid_);
  ComplexVector spec;
  fft.forward_real(density, spec);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol_[i];
  RealVector out;
  fft.inverse_real(spec, out);
  return out;
}

RealVector riesz_convolve(const RieszSpec& spec, const GridSpec& grid, const RealVector& density, KernelMode mode) {
  return RieszOperator(grid, spec, mode).apply(density);
}

RealVector regularized_power_weight(const GridSpec& grid, double exponent, double delta) {
  if (delta < 0.0) delta = grid.spacing() / 2.0;
  const double origin_cell = 0.25 * grid.spacing() * grid.spacing();
  RealVector w(grid.size());
  grid.for_each_point([&](std::size_t i, const std::array<double, 3>& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    w[i] = std::pow(r2 < origin_cell ? r2 + delta * delta : r2, exponent / 2.0);
  });
  return w;
}

double lattice_zeta(int dim, double s) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("lattice_zeta: dim must be 1, 2 or 3");
  if (!(s > 0.0 && s < dim)) throw std::invalid_argument("lattice_zeta: need 0 < s < dim");
  // Theta-function splitting at t = 1: both lattice sums converge like
  // exp(-pi |j|^2), so |j_i| <= 6 is far below double rounding.
  auto tail = [](double a, double x) { return std::pow(x, -a) * boost::math::tgamma(a, x); };
  const int reach = 6;
  double sum = 0.0;
  const int ry = dim >= 2 ? reach : 0;
  const int rz = dim >= 3 ? reach : 0;
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -ry; j <= ry; ++j) {
      for (int k = -rz; k <= rz; ++k) {
        const int m2 = i * i + j * j + k * k;
        if (m2 == 0) continue;
        const double x = M_PI * m2;
        sum += tail(s / 2.0, x) + tail((dim - s) / 2.0, x);
      }
    }
  }
  sum += 2.0 / (s - dim) - 2.0 / s;
  return std::pow(M_PI, s / 2.0) / std::tgamma(s / 2.0) * sum;
}

double lattice_corrected_delta(int dim, double exponent, double spacing) {
  if (!(exponent < 0.0 && exponent > -dim)) {
    throw std::invalid_argument("lattice_corrected_delta: need -dim < exponent < 0");
  }
  // h^dim sum'_{j} |jh|^e g(jh) = int |x|^e g - Z(-e) h^{dim+e} g(0) + ...,
  // so the origin weight delta^e must equal -Z(-e) h^e.
  const double z = lattice_zeta(dim, -exponent);
  if (!(z < 0.0)) throw std::domain_error("lattice correction has the wrong sign for this exponent");
  return spacing * std::pow(-z, 1.0 / exponent);
}

// ---------------------------------------------------------------------------
// Probe functions

namespace {

constexpr int kBumpPower = 8;

// int_{-1}^{1} (1 - t^2)^a dt = sqrt(pi) Gamma(a + 1) / Gamma(a + 3/2).
double bump_moment(double a) {
  return std::exp(0.5 * std::log(M_PI) + std::lgamma(a + 1.0) - std::lgamma(a + 1.5));
}

double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::pow(1.0 - t * t, kBumpPower);
}

double bump_derivative(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return -2.0 * kBumpPower * t * std::pow(1.0 - t * t, kBumpPower - 1);
}

}  // namespace

TestFunction TestFunction::gaussian(double sigma) {
  TestFunction f;
  f.kind = Kind::Gaussian;
  f.width = sigma;
  return f;
}

TestFunction TestFunction::dilated_gaussian(double sigma, double lambda) {
  TestFunction f;
  f.kind = Kind::DilatedGaussian;
  f.width = sigma;
  f.dilation = lambda;
  return f;
}

TestFunction TestFunction::bump_product(double half_width) {
  TestFunction f;
  f.kind = Kind::BumpProduct;
  f.width = half_width;
  return f;
}

double TestFunction::value(const std::array<double, 3>& x, int dim) const {
  if (kind == Kind::BumpProduct) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= bump((x[d] - center[d]) / width);
    return v;
  }
  const double sigma = kind == Kind::DilatedGaussian ? width / dilation : width;
  double r2 = 0.0;
  for (int d = 0; d < dim; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
  return std::exp(-r2 / (2.0 * sigma * sigma));
}

std::array<double, 3> TestFunction::gradient(const std::array<double, 3>& x, int dim) const {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  if (kind == Kind::BumpProduct) {
    for (int d = 0; d < dim; ++d) {
      double v = bump_derivative((x[d] - center[d]) / width) / width;
      for (int e = 0; e < dim; ++e) {
        if (e != d) v *= bump((x[e] - center[e]) / width);
      }
      g[d] = v;
    }
    return g;
  }
  const double sigma = kind == Kind::DilatedGaussian ? width / dilation : width;
  const double v = value(x, dim);
  for (int d = 0; d < dim; ++d) g[d] = -(x[d] - center[d]) / (sigma * sigma) * v;
  return g;
}

double TestFunction::lp_norm(double p, int dim) const {
  if (!(p >= 1.0) || std::isinf(p)) {
    if (std::isinf(p)) return 1.0;
    throw std::invalid_argument("lp_norm requires p >= 1");
  }
  if (kind == Kind::BumpProduct) return std::pow(width * bump_moment(kBumpPower * p), dim / p);
  const double sigma = kind == Kind::DilatedGaussian ? width / dilation : width;
  return std::pow(2.0 * M_PI * sigma * sigma / p, dim / (2.0 * p));
}

double TestFunction::gradient_l2_norm(int dim) const {
  if (kind == Kind::BumpProduct) {
    // int phi'(t)^2 dt = 4 k^2 int t^2 (1 - t^2)^{2k - 2} dt, via the beta function.
    const double k = kBumpPower;
    const double a = 2.0 * k - 2.0;
    const double t2_moment = std::exp(std::lgamma(1.5) + std::lgamma(a + 1.0) - std::lgamma(a + 2.5));
    const double deriv = 4.0 * k * k * t2_moment / width;
    const double plain = width * bump_moment(2.0 * k);
    return std::sqrt(dim * deriv * std::pow(plain, dim - 1));
  }
  const double sigma = kind == Kind::DilatedGaussian ? width / dilation : width;
  return std::sqrt(dim / (2.0 * sigma * sigma) * std::pow(M_PI * sigma * sigma, dim / 2.0));
}

RealVector TestFunction::sample(const GridSpec& grid) const {
  RealVector out(grid.size());
  grid.for_each_point([&](std::size_t i, const std::array<double, 3>& x) { out[i] = value(x, grid.dim); });
  return out;
}

// ---------------------------------------------------------------------------
// Inequality ratios

double hls_ratio(const RieszSpec& spec, const GridSpec& grid, const RealVector& f, const RealVector& g, double q,
                 double r, double s, KernelMode mode) {
  for (double e : {q, r, s}) {
    if (!(e > 1.0) || std::isinf(e)) throw std::invalid_argument("hls_ratio requires 1 < q, r, s < inf");
  }
  const double balance = 1.0 / r + 1.0 / s - 1.0 / q - spec.alpha / spec.n;
  if (std::abs(balance) > 1e-12) {
    throw std::invalid_argument("hls_ratio requires 1/r + 1/s = 1/q + alpha/n");
  }
  const RealVector conv = RieszOperator(grid, spec, mode).apply(g);
  RealVector prod(grid.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f[i] * conv[i];
  const double denom = lp_norm(grid, std::span<const double>(f), r) * lp_norm(grid, std::span<const double>(g), s);
  if (!(denom > 0.0)) throw std::invalid_argument("hls_ratio undefined for vanishing inputs");
  return lp_norm(grid, std::span<const double>(prod), q) / denom;
}

double ckn_ratio(const Field& f, double p, double q, double b) {
  const GridSpec& grid = f.grid();
  const double n = grid.dim;
  if (!(p > 1.0 && p <= q) || std::isinf(q)) throw std::invalid_argument("ckn_ratio requires 1 < p <= q < inf");
  if (!(b > -n / q && b <= 0.0)) throw std::invalid_argument("ckn_ratio requires -n/q < b <= 0");
  if (std::abs(-b - 1.0 - (n / q - n / p)) > 1e-12) {
    throw std::invalid_argument("ckn_ratio requires -b - 1 = n/q - n/p");
  }
  const auto grad = spectral_gradient(f);
  RealVector grad_mod(grid.size());
  for (std::size_t i = 0; i < grad_mod.size(); ++i) {
    grad_mod[i] = std::sqrt(std::norm(grad[0][i]) + std::norm(grad[1][i]) + std::norm(grad[2][i]));
  }
  const double denom = lp_norm(grid, std::span<const double>(grad_mod), p);
  if (!(denom > 0.0)) throw std::invalid_argument("ckn_ratio undefined for f with vanishing gradient");
  const RealVector w = regularized_power_weight(grid, b);
  RealVector weighted(grid.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = w[i] * std::abs(f[i]);
  return lp_norm(grid, std::span<const double>(weighted), q) / denom;
}

}  // namespace hartree
