#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <new>
#include <span>
#include <vector>

namespace hartree {

/// Allocator backed by fftw_malloc so every buffer has the SIMD alignment
/// the cached FFTW plans were created with.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}  // NOLINT(google-explicit-constructor)

  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;

  friend bool operator==(const FftwAllocator&, const FftwAllocator&) { return true; }
};

void* fftw_aligned_alloc(std::size_t bytes);
void fftw_aligned_free(void* p) noexcept;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_array_new_length();
  return static_cast<T*>(fftw_aligned_alloc(n * sizeof(T)));
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_aligned_free(p);
}

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex, FftwAllocator<Complex>>;
using RealVector = std::vector<double, FftwAllocator<double>>;

/// Uniform periodic grid on [-L, L)^dim with `points` samples per axis.
struct GridSpec {
  GridSpec(int dim, int points, double half_width);

  int dim;
  int points;
  double half_width;

  [[nodiscard]] double spacing() const { return 2.0 * half_width / points; }
  [[nodiscard]] double cell_volume() const;
  [[nodiscard]] std::size_t size() const;
  /// Number of entries of the real-to-complex half spectrum.
  [[nodiscard]] std::size_t half_spectrum_size() const;
  [[nodiscard]] double coordinate(int i) const { return -half_width + i * spacing(); }
  /// Angular wavenumber of DFT index i: pi * m / L with m in [-N/2, N/2).
  [[nodiscard]] double wavenumber(int i) const;
  /// Signed integer frequency of DFT index i.
  [[nodiscard]] int frequency(int i) const { return i < points / 2 ? i : i - points; }

  /// Calls fn(flat_index, x) for every grid point; unused axes of x are 0.
  void for_each_point(const std::function<void(std::size_t, const std::array<double, 3>&)>& fn) const;
  /// Calls fn(flat_index, k, integer frequencies) over the full spectrum.
  void for_each_mode(
      const std::function<void(std::size_t, const std::array<double, 3>&, const std::array<int, 3>&)>& fn) const;
  /// Same over the half spectrum of a real transform (last axis 0..N/2).
  void for_each_half_mode(
      const std::function<void(std::size_t, const std::array<double, 3>&, const std::array<int, 3>&)>& fn) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Complex samples on a grid.
class Field {
 public:
  explicit Field(const GridSpec& grid);
  Field(const GridSpec& grid, ComplexVector values);

  static Field from_function(const GridSpec& grid, const std::function<Complex(const std::array<double, 3>&)>& fn);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<Complex> values() { return values_; }
  [[nodiscard]] std::span<const Complex> values() const { return values_; }
  [[nodiscard]] ComplexVector& storage() { return values_; }
  [[nodiscard]] const ComplexVector& storage() const { return values_; }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(Complex scale);
  friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
  friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
  friend Field operator*(Field lhs, Complex scale) { return lhs *= scale; }

  [[nodiscard]] Field conj() const;
  [[nodiscard]] bool all_finite() const;

 private:
  GridSpec grid_;
  ComplexVector values_;
};

/// (h^dim * sum |u|^p)^(1/p); p = +inf gives the max modulus.
double lp_norm(const GridSpec& grid, std::span<const Complex> values, double p);
double lp_norm(const GridSpec& grid, std::span<const double> values, double p);
double lp_norm(const Field& u, double p);
/// ||u||_2^2.
double mass(const Field& u);
/// ||grad u||_2^2 computed spectrally with |k|^2 (Nyquist included), the
/// same symbol the free propagator uses.
double gradient_energy(const Field& u);
/// (||u||_2^2 + ||grad u||_2^2)^(1/2).
double h1_norm(const Field& u);
/// Spectral gradient components (Nyquist mode dropped).
std::array<Field, 3> spectral_gradient(const Field& u);

}  // namespace hartree
