#include "hartree/fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace hartree {

namespace {

struct PlanSet {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& thread_setting() {
  static int threads = 0;  // 0 = not yet initialised
  return threads;
}

int threads_from_env() {
  if (const char* env = std::getenv("HARTREE_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1 && value <= 256) return static_cast<int>(value);
  }
  return 1;
}

// Requires planner_mutex held.
void ensure_threads_initialised() {
  static bool initialised = false;
  if (!initialised) {
    fftw_init_threads();
    initialised = true;
  }
  if (thread_setting() == 0) thread_setting() = threads_from_env();
  fftw_plan_with_nthreads(thread_setting());
}

using PlanKey = std::tuple<int, int, int>;  // dim, points, threads

std::map<PlanKey, PlanSet>& plan_cache() {
  static std::map<PlanKey, PlanSet> cache;
  return cache;
}

const PlanSet& plans_for(const GridSpec& g) {
  std::lock_guard lock(planner_mutex());
  ensure_threads_initialised();
  const PlanKey key{g.dim, g.points, thread_setting()};
  auto& cache = plan_cache();
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  int dims[3] = {g.points, g.points, g.points};
  // Measuring pays off once grids are large enough for the transforms to dominate.
  const unsigned flags = g.size() >= (1u << 15) ? FFTW_MEASURE : FFTW_ESTIMATE;
  ComplexVector a(g.size());
  ComplexVector half(g.half_spectrum_size());
  RealVector r(g.size());
  auto* ca = reinterpret_cast<fftw_complex*>(a.data());
  auto* ch = reinterpret_cast<fftw_complex*>(half.data());

  PlanSet set;
  set.forward = fftw_plan_dft(g.dim, dims, ca, ca, FFTW_FORWARD, flags);
  set.inverse = fftw_plan_dft(g.dim, dims, ca, ca, FFTW_BACKWARD, flags);
  set.r2c = fftw_plan_dft_r2c(g.dim, dims, r.data(), ch, flags);
  set.c2r = fftw_plan_dft_c2r(g.dim, dims, ch, r.data(), flags);
  if (!set.forward || !set.inverse || !set.r2c || !set.c2r) {
    throw std::runtime_error("FFTW failed to create plans for grid of " + std::to_string(g.points));
  }
  return cache.emplace(key, set).first->second;
}

}  // namespace

void set_fft_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  std::lock_guard lock(planner_mutex());
  thread_setting() = threads;
}

int fft_threads() {
  std::lock_guard lock(planner_mutex());
  if (thread_setting() == 0) thread_setting() = threads_from_env();
  return thread_setting();
}

FftEngine::FftEngine(const GridSpec& grid) : grid_(grid) {
  const PlanSet& set = plans_for(grid);
  forward_plan_ = set.forward;
  inverse_plan_ = set.inverse;
  r2c_plan_ = set.r2c;
  c2r_plan_ = set.c2r;
}

void FftEngine::forward(ComplexVector& data) const {
  if (data.size() != grid_.size()) throw std::invalid_argument("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FftEngine::inverse(ComplexVector& data) const {
  if (data.size() != grid_.size()) throw std::invalid_argument("FFT buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), p, p);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& v : data) v *= scale;
}

void FftEngine::forward_real(const RealVector& in, ComplexVector& out) const {
  if (in.size() != grid_.size()) throw std::invalid_argument("FFT buffer size mismatch");
  out.resize(grid_.half_spectrum_size());
  // r2c does not modify its input; FFTW's signature is simply non-const.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void FftEngine::inverse_real(ComplexVector& in, RealVector& out) const {
  if (in.size() != grid_.half_spectrum_size()) throw std::invalid_argument("FFT buffer size mismatch");
  out.resize(grid_.size());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_plan_), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& v : out) v *= scale;
}

}  // namespace hartree
