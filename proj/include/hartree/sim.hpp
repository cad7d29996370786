#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hartree/exponent_core.hpp"
#include "hartree/fft.hpp"
#include "hartree/grid.hpp"
#include "hartree/riesz.hpp"

namespace hartree {

/// Data of  i u_t + Lap u = eps (I_alpha * |x|^{-b}|u|^p) |x|^{-b} |u|^{p-2} u.
/// Exponents (p, scaling) use pt.n; the kernel lives on the grid dimension.
struct ModelParams {
  ParamPoint pt;
  CriticalPower p;
  int epsilon = 1;
  RieszSpec riesz;
  KernelMode kernel = KernelMode::FreeSpaceTruncated;
  /// Multiplies the nonlinearity; 0 gives the free equation.
  double coupling = 1.0;

  /// Critical power from pt; kernel dimension `grid_dim`.
  static ModelParams make(const ParamPoint& pt, int epsilon, int grid_dim = 3,
                          KernelMode kernel = KernelMode::FreeSpaceTruncated);

  [[nodiscard]] double power() const { return p.p.to_double(); }
  [[nodiscard]] double b() const { return pt.b.to_double(); }
  /// Grid dimension below the parameter dimension: outside the hypotheses.
  [[nodiscard]] bool toy_mode() const { return riesz.n != pt.n; }
};

enum class Scheme { Strang };

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::Strang;
  /// Origin-cell regularisation of |x|^{-b}; nullopt means h/2.
  std::optional<double> weight_regularization;
  /// Keep a snapshot every this many steps (0: none besides the final state).
  int snapshot_every = 0;
  /// Record mass/energy every this many steps (0: only start and end).
  int diagnostics_every = 0;
  /// Abort when, at a diagnostics row, more than this share of the H^1
  /// spectral mass sits in the outer half of the frequency box: the grid no
  /// longer resolves the solution, as in focusing blow-up. 0 disables.
  double resolution_guard = 0.05;

  /// Number of steps; throws unless dt divides t_end to 1e-9 relative.
  [[nodiscard]] long steps() const;
};

/// Thrown when the state stops being finite or outruns the grid (focusing blow-up).
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, double time, long step)
      : std::runtime_error(what), time_(time), step_(step) {}
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] long step() const { return step_; }

 private:
  double time_;
  long step_;
};

struct Conserved {
  double mass = 0.0;
  double energy = 0.0;
};

struct DiagnosticsRow {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double h1 = 0.0;
};

struct Snapshot {
  double time = 0.0;
  Field field;
};

struct Trajectory {
  Field final_state;
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRow> diagnostics;
};

/// Model bound to a grid: caches the weight, the Riesz operator and |k|^2.
class HartreeSystem {
 public:
  HartreeSystem(const GridSpec& grid, const ModelParams& params,
                std::optional<double> weight_regularization = std::nullopt);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const ModelParams& params() const { return params_; }
  [[nodiscard]] const RealVector& weight() const { return weight_; }

  /// V[u] = |x|^{-b}|u|^{p-2} (I_alpha * |x|^{-b}|u|^p), so N[u] = V[u] u.
  [[nodiscard]] RealVector potential(const Field& u) const;
  [[nodiscard]] Field nonlinearity(const Field& u) const;
  /// Exact solution of i u_t + Lap u = 0 over time t (symbol e^{-i t |k|^2}).
  void free_propagate(Field& u, double t) const;
  /// u <- exp(-i eps coupling tau V[u]) u; |u| is unchanged so V is frozen.
  void kick(Field& u, double tau) const;
  void step(Field& u, double dt) const;
  /// `steps` Strang steps with adjacent half kicks merged.
  void advance(Field& u, double dt, long steps) const;
  [[nodiscard]] Trajectory evolve(const Field& u0, const EvolutionConfig& config) const;

  [[nodiscard]] Conserved conserved(const Field& u) const;
  /// int |x|^{-b}|u|^p (I_alpha * |x|^{-b}|u|^p).
  [[nodiscard]] double interaction(const Field& u) const;

 private:
  [[nodiscard]] RealVector density(const Field& u) const;
  [[nodiscard]] std::shared_ptr<const ComplexVector> propagator_phase(double t) const;

  GridSpec grid_;
  ModelParams params_;
  RealVector weight_;
  RieszOperator riesz_;
  FftEngine fft_;
  RealVector k2_;
  mutable std::mutex phase_mutex_;
  mutable std::vector<std::pair<double, std::shared_ptr<const ComplexVector>>> phase_cache_;
};

Field nonlinearity(const ModelParams& params, const Field& u);
Field free_propagate(const Field& u, double t);
Field step_strang(const ModelParams& params, const EvolutionConfig& config, const Field& u);
Conserved conserved_quantities(const ModelParams& params, const Field& u);

/// E = 1/2 ||grad u||^2 + eps/(2p) int |x|^{-b}|u|^p (I_alpha * |x|^{-b}|u|^p).
double energy(const ModelParams& params, const Field& u);

/// ||f||_{H^1} of f = a - b, computed spectrally.
double h1_distance(const Field& a, const Field& b);

// ---------------------------------------------------------------------------
// Scaling

struct ScalingReport {
  /// ||v(t/delta^2) - u_delta(t)||_{H^1} / ||v(t/delta^2)||_{H^1}.
  double discrepancy = 0.0;
  double amplitude_exponent = 0.0;
  /// Fraction of the rescaled datum's H^1 spectral mass in the outer half of
  /// the frequency box.
  double rescaled_tail = 0.0;
  /// ||v - v_free||_{H^1} / ||v||_{H^1}: how much the nonlinearity moved v.
  /// A discrepancy is only meaningful when it is small against this.
  double nonlinear_share = 0.0;
};

/// Evolves u0 to t and delta^a u0(delta x) to t/delta^2 on the same grid and
/// compares v with delta^a u(delta x, t). delta must be 2^j, j >= 0. Throws
/// std::invalid_argument when the rescaled datum is not resolved (tail above
/// `max_tail`).
ScalingReport scaling_covariance_check(const ModelParams& params, const Field& u0, const Rational& delta, double t,
                                       const EvolutionConfig& config, double max_tail = 1e-6);

// ---------------------------------------------------------------------------
// Picard iteration of the Duhamel map

struct PicardConfig {
  double T = 0.5;
  /// Trapezoid nodes on [0, T] (the node count is nodes + 1).
  int nodes = 64;
  int max_iterations = 8;
  /// Mixed norm used for the second distance; reciprocals, 0 = infinity.
  Rational inv_q = Rational(1, 2);
  Rational inv_r = Rational(1, 6);
  /// Stop after this many consecutive ratios above 1.
  int divergence_patience = 2;
  std::optional<double> weight_regularization;
};

struct PicardResult {
  /// d_k = sup over nodes of ||u^(k+1) - u^(k)||_{H^1}, k = 0, 1, ...
  std::vector<double> sup_h1_differences;
  /// max of the L^inf_t L^2_x and L^q_t L^r_x norms of u^(k+1) - u^(k).
  std::vector<double> mixed_differences;
  /// d_{k+1} / d_k.
  std::vector<double> contraction_factors;
  bool diverged = false;
  /// Last iterate at t = T.
  Field final_state;
};

/// u^(0) = free flow, u^(k+1) = Phi(u^(k)) with
/// Phi(u)(t) = S(t) u0 - i eps int_0^t S(t - s) N[u](s) ds, S(t) = e^{it Lap}.
PicardResult picard_iterate(const ModelParams& params, const Field& u0, const PicardConfig& config);

// ---------------------------------------------------------------------------
// Mixed norms and dispersive diagnostics

/// (int ||u(t)||_r^q dt)^{1/q} over equispaced snapshots (trapezoid), or the
/// max for q = infinity. Throws unless (q, r) is admissible for the grid
/// dimension.
double strichartz_norm(std::span<const Field> snapshots, double dt, const Rational& inv_q, const Rational& inv_r);

/// L / (2 v), v = 2 k_eff, where the ball |k| <= k_eff carries all but
/// `tail` of the datum's H^1 spectral mass.
double wraparound_horizon(const Field& u0, double tail = 1e-6);

struct ScatteringReport {
  std::vector<double> times;
  /// ||w(t_{j+1}) - w(t_j)||_{H^1}, w(t) = S(-t) u(t).
  std::vector<double> differences;
  /// True when t_{j+1} lies beyond the horizon; the value is untrusted.
  std::vector<bool> beyond_horizon;
  double horizon = 0.0;
};

ScatteringReport scattering_proxy(const ModelParams& params, const Field& u0, const std::vector<double>& times,
                                  const EvolutionConfig& config, double horizon_tail = 1e-6);

struct DependenceReport {
  double initial_distance = 0.0;
  double sup_distance = 0.0;
  /// sup_distance / initial_distance.
  double constant = 0.0;
};

/// Sup over the step grid of ||u(t) - v(t)||_{H^1} for two data.
DependenceReport continuous_dependence(const ModelParams& params, const Field& u0, const Field& v0,
                                       const EvolutionConfig& config);

}  // namespace hartree
