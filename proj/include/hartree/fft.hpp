#pragma once

#include "hartree/grid.hpp"

namespace hartree {

/// Thin wrapper over cached FFTW plans for one grid shape. Plans are
/// created once per shape (under a lock) and executed with the new-array
/// interface, so engines are cheap to copy and safe to use from several
/// threads on distinct buffers.
class FftEngine {
 public:
  explicit FftEngine(const GridSpec& grid);

  /// In-place unnormalised forward transform (e^{-i k x}).
  void forward(ComplexVector& data) const;
  /// In-place inverse transform including the 1/N^dim factor.
  void inverse(ComplexVector& data) const;
  /// Real to half-spectrum, unnormalised.
  void forward_real(const RealVector& in, ComplexVector& out) const;
  /// Half-spectrum to real including the 1/N^dim factor. Destroys `in`.
  void inverse_real(ComplexVector& in, RealVector& out) const;

  [[nodiscard]] const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  void* forward_plan_;
  void* inverse_plan_;
  void* r2c_plan_;
  void* c2r_plan_;
};

/// Caps FFTW's internal threads. Reads HARTREE_THREADS on first use when
/// never called explicitly.
void set_fft_threads(int threads);
int fft_threads();

}  // namespace hartree
