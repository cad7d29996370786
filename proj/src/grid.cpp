#include "hartree/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "hartree/fft.hpp"

namespace hartree {

void* fftw_aligned_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void fftw_aligned_free(void* p) noexcept { fftw_free(p); }

GridSpec::GridSpec(int dim_, int points_, double half_width_)
    : dim(dim_), points(points_), half_width(half_width_) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (points < 4 || points % 2 != 0) {
    throw std::invalid_argument("grid points per axis must be even and >= 4, got " + std::to_string(points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("grid half width must be positive");
  }
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points);
  return total;
}

std::size_t GridSpec::half_spectrum_size() const {
  return size() / static_cast<std::size_t>(points) * static_cast<std::size_t>(points / 2 + 1);
}

double GridSpec::wavenumber(int i) const { return M_PI * frequency(i) / half_width; }

void GridSpec::for_each_point(const std::function<void(std::size_t, const std::array<double, 3>&)>& fn) const {
  const int n0 = points;
  const int n1 = dim >= 2 ? points : 1;
  const int n2 = dim >= 3 ? points : 1;
  std::size_t idx = 0;
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int i = 0; i < n0; ++i) {
    x[0] = coordinate(i);
    for (int j = 0; j < n1; ++j) {
      if (dim >= 2) x[1] = coordinate(j);
      for (int k = 0; k < n2; ++k) {
        if (dim >= 3) x[2] = coordinate(k);
        fn(idx++, x);
      }
    }
  }
}

namespace {

void visit_modes(const GridSpec& g, int last_axis_count,
                 const std::function<void(std::size_t, const std::array<double, 3>&, const std::array<int, 3>&)>& fn) {
  // The last axis of the grid is the contiguous one; for half spectra its
  // extent shrinks to N/2 + 1.
  std::array<int, 3> extent{1, 1, 1};
  for (int d = 0; d < g.dim; ++d) extent[d] = g.points;
  extent[g.dim - 1] = last_axis_count;
  std::size_t idx = 0;
  std::array<double, 3> k{0.0, 0.0, 0.0};
  std::array<int, 3> m{0, 0, 0};
  for (int i = 0; i < extent[0]; ++i) {
    m[0] = g.frequency(i);
    k[0] = g.wavenumber(i);
    for (int j = 0; j < extent[1]; ++j) {
      if (g.dim >= 2) {
        m[1] = g.frequency(j);
        k[1] = g.wavenumber(j);
      }
      for (int l = 0; l < extent[2]; ++l) {
        if (g.dim >= 3) {
          m[2] = g.frequency(l);
          k[2] = g.wavenumber(l);
        }
        fn(idx++, k, m);
      }
    }
  }
}

}  // namespace

void GridSpec::for_each_mode(
    const std::function<void(std::size_t, const std::array<double, 3>&, const std::array<int, 3>&)>& fn) const {
  visit_modes(*this, points, fn);
}

void GridSpec::for_each_half_mode(
    const std::function<void(std::size_t, const std::array<double, 3>&, const std::array<int, 3>&)>& fn) const {
  // frequency() maps index N/2 to -N/2; on the half spectrum's last axis the
  // entry at N/2 is the Nyquist mode, whose |k| is the same either way.
  visit_modes(*this, points / 2 + 1, fn);
}

Field::Field(const GridSpec& grid) : grid_(grid), values_(grid.size(), Complex(0.0, 0.0)) {}

Field::Field(const GridSpec& grid, ComplexVector values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

Field Field::from_function(const GridSpec& grid, const std::function<Complex(const std::array<double, 3>&)>& fn) {
  Field out(grid);
  grid.for_each_point([&](std::size_t i, const std::array<double, 3>& x) { out.values_[i] = fn(x); });
  return out;
}

Field& Field::operator+=(const Field& rhs) {
  if (!(rhs.grid_ == grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  if (!(rhs.grid_ == grid_)) throw std::invalid_argument("field grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Field& Field::operator*=(Complex scale) {
  for (auto& v : values_) v *= scale;
  return *this;
}

Field Field::conj() const {
  Field out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

bool Field::all_finite() const {
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

namespace {

template <class T>
double lp_norm_impl(const GridSpec& grid, std::span<const T> values, double p) {
  if (values.size() != grid.size()) throw std::invalid_argument("value count does not match grid");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm requires p >= 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& v : values) sum += std::norm(v);
  } else {
    for (const auto& v : values) sum += std::pow(std::abs(v), p);
  }
  return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

}  // namespace

double lp_norm(const GridSpec& grid, std::span<const Complex> values, double p) {
  return lp_norm_impl(grid, values, p);
}

double lp_norm(const GridSpec& grid, std::span<const double> values, double p) {
  return lp_norm_impl(grid, values, p);
}

double lp_norm(const Field& u, double p) { return lp_norm(u.grid(), u.values(), p); }

double mass(const Field& u) {
  double sum = 0.0;
  for (const auto& v : u.values()) sum += std::norm(v);
  return sum * u.grid().cell_volume();
}

double gradient_energy(const Field& u) {
  const GridSpec& g = u.grid();
  ComplexVector spec(u.storage());
  FftEngine(g).forward(spec);
  double sum = 0.0;
  g.for_each_mode([&](std::size_t i, const std::array<double, 3>& k, const std::array<int, 3>&) {
    sum += (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * std::norm(spec[i]);
  });
  // Parseval for the unnormalised DFT: sum |u_j|^2 = sum |u^_m|^2 / M.
  return sum * g.cell_volume() / static_cast<double>(g.size());
}

double h1_norm(const Field& u) { return std::sqrt(mass(u) + gradient_energy(u)); }

std::array<Field, 3> spectral_gradient(const Field& u) {
  const GridSpec& g = u.grid();
  FftEngine fft(g);
  ComplexVector spec(u.storage());
  fft.forward(spec);
  std::array<Field, 3> out{Field(g), Field(g), Field(g)};
  for (int d = 0; d < g.dim; ++d) {
    ComplexVector& dst = out[d].storage();
    g.for_each_mode([&](std::size_t i, const std::array<double, 3>& k, const std::array<int, 3>& m) {
      const bool nyquist = m[d] == -g.points / 2;
      dst[i] = nyquist ? Complex(0.0, 0.0) : Complex(0.0, k[d]) * spec[i];
    });
    fft.inverse(dst);
  }
  return out;
}

}  // namespace hartree
