#include "hartree/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace hartree {

namespace {

// Modulus floor for |u|^{p-2}: keeps 0^0 and 0^{negative} out of the pow.
constexpr double kModulusFloor = 1e-300;

// m^e with a multiplication fast path for small integer exponents, which
// covers the common critical powers p = 3, 4 and p - 2 = 1, 2.
struct PowerFn {
  explicit PowerFn(double exponent) : e(exponent), integral(exponent == std::round(exponent) && exponent >= 0.0 && exponent <= 8.0) {}
  double operator()(double m) const {
    if (!integral) return std::pow(m, e);
    double out = 1.0;
    for (int k = 0; k < static_cast<int>(e); ++k) out *= m;
    return out;
  }
  double e;
  bool integral;
};

double modulus(const Complex& z) { return std::sqrt(std::norm(z)); }

RealVector squared_wavenumbers(const GridSpec& grid) {
  RealVector k2(grid.size());
  grid.for_each_mode([&](std::size_t i, const std::array<double, 3>& k, const std::array<int, 3>&) {
    k2[i] = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  });
  return k2;
}

double parseval_factor(const GridSpec& grid) { return grid.cell_volume() / static_cast<double>(grid.size()); }

bool all_finite(const ComplexVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double exponent_from_reciprocal(const Rational& inv) {
  return inv.is_zero() ? std::numeric_limits<double>::infinity() : inv.reciprocal().to_double();
}

}  // namespace

ModelParams ModelParams::make(const ParamPoint& pt, int epsilon, int grid_dim, KernelMode kernel) {
  if (epsilon != 1 && epsilon != -1) throw std::invalid_argument("epsilon must be +1 or -1");
  if (grid_dim < 1 || grid_dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  const double alpha = pt.alpha.to_double();
  if (!(alpha < grid_dim)) {
    throw std::invalid_argument("alpha = " + pt.alpha.str() + " is not below the grid dimension " +
                                std::to_string(grid_dim));
  }
  ModelParams out{pt, critical_power(pt), epsilon, RieszSpec::make(grid_dim, alpha), kernel, 1.0};
  if (out.p.p < Rational(2)) throw std::invalid_argument("critical power below 2: " + out.p.p.str());
  return out;
}

long EvolutionConfig::steps() const {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("dt and t_end must be positive");
  const double ratio = t_end / dt;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
    throw std::invalid_argument("dt does not divide t_end");
  }
  return n;
}

HartreeSystem::HartreeSystem(const GridSpec& grid, const ModelParams& params,
                             std::optional<double> weight_regularization)
    : grid_(grid),
      params_(params),
      weight_(regularized_power_weight(grid, -params.b(), weight_regularization.value_or(-1.0))),
      riesz_(grid, params.riesz, params.kernel),
      fft_(grid),
      k2_(squared_wavenumbers(grid)) {
  if (weight_regularization && *weight_regularization < 0.0) {
    throw std::invalid_argument("weight regularisation must be >= 0");
  }
}

RealVector HartreeSystem::density(const Field& u) const {
  const PowerFn pow_p(params_.power());
  RealVector rho(u.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = weight_[i] * pow_p(modulus(u[i]));
  return rho;
}

RealVector HartreeSystem::potential(const Field& u) const {
  if (!(u.grid() == grid_)) throw std::invalid_argument("field grid differs from the system grid");
  RealVector v = riesz_.apply(density(u));
  const PowerFn pow_e(params_.power() - 2.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= weight_[i] * pow_e(std::max(modulus(u[i]), kModulusFloor));
  return v;
}

Field HartreeSystem::nonlinearity(const Field& u) const {
  const RealVector v = potential(u);
  Field out(u);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] *= v[i];
  return out;
}

void HartreeSystem::free_propagate(Field& u, double t) const {
  if (!(u.grid() == grid_)) throw std::invalid_argument("field grid differs from the system grid");
  if (t == 0.0) return;
  ComplexVector& data = u.storage();
  fft_.forward(data);
  const std::shared_ptr<const ComplexVector> phase = propagator_phase(t);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= (*phase)[i];
  fft_.inverse(data);
}

std::shared_ptr<const ComplexVector> HartreeSystem::propagator_phase(double t) const {
  const std::lock_guard<std::mutex> lock(phase_mutex_);
  for (const auto& [time, phase] : phase_cache_) {
    if (time == t) return phase;
  }
  auto phase = std::make_shared<ComplexVector>(k2_.size());
  for (std::size_t i = 0; i < k2_.size(); ++i) (*phase)[i] = std::polar(1.0, -t * k2_[i]);
  // Steps only ever use a handful of distinct times.
  if (phase_cache_.size() >= 4) phase_cache_.erase(phase_cache_.begin());
  phase_cache_.emplace_back(t, phase);
  return phase;
}

void HartreeSystem::kick(Field& u, double tau) const {
  const double scale = params_.epsilon * params_.coupling * tau;
  if (scale == 0.0) return;
  const RealVector v = potential(u);
  for (std::size_t i = 0; i < v.size(); ++i) u[i] *= std::polar(1.0, -scale * v[i]);
}

void HartreeSystem::step(Field& u, double dt) const { advance(u, dt, 1); }

void HartreeSystem::advance(Field& u, double dt, long steps) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (steps <= 0) return;
  kick(u, dt / 2.0);
  for (long s = 0; s < steps; ++s) {
    free_propagate(u, dt);
    kick(u, s + 1 == steps ? dt / 2.0 : dt);
    if (!all_finite(u.storage())) {
      throw NumericalAbort("non-finite state after step " + std::to_string(s + 1), dt * static_cast<double>(s + 1),
                           s + 1);
    }
  }
}

namespace {
double outer_spectral_share(const Field& u);
}  // namespace

Trajectory HartreeSystem::evolve(const Field& u0, const EvolutionConfig& config) const {
  const long total = config.steps();
  Trajectory out{u0, {}, {}};
  Field& u = out.final_state;
  auto record = [&](long step) {
    const double t = config.dt * static_cast<double>(step);
    const bool diag = config.diagnostics_every > 0 ? step % config.diagnostics_every == 0 : step == 0;
    if (diag || step == total) {
      const Conserved c = conserved(u);
      out.diagnostics.push_back({step, t, c.mass, c.energy, h1_norm(u)});
      if (step > 0 && config.resolution_guard > 0.0) {
        const double share = outer_spectral_share(u);
        if (share > config.resolution_guard) {
          throw NumericalAbort("solution no longer resolved at step " + std::to_string(step) +
                                   " (outer spectral share " + std::to_string(share) + ", possible blow-up)",
                               t, step);
        }
      }
    }
    if (config.snapshot_every > 0 && (step % config.snapshot_every == 0 || step == total)) {
      out.snapshots.push_back({t, u});
    }
  };
  if (!u.all_finite()) throw NumericalAbort("initial datum is not finite", 0.0, 0);
  record(0);
  long done = 0;
  while (done < total) {
    long next = total;
    if (config.snapshot_every > 0) next = std::min(next, (done / config.snapshot_every + 1) * config.snapshot_every);
    if (config.diagnostics_every > 0) {
      next = std::min(next, (done / config.diagnostics_every + 1) * config.diagnostics_every);
    }
    try {
      advance(u, config.dt, next - done);
    } catch (const NumericalAbort& e) {
      const long step = done + e.step();
      throw NumericalAbort("non-finite state at step " + std::to_string(step) + " (possible blow-up)",
                           config.dt * static_cast<double>(step), step);
    }
    done = next;
    record(done);
  }
  return out;
}

double HartreeSystem::interaction(const Field& u) const {
  const RealVector rho = density(u);
  const RealVector phi = riesz_.apply(rho);
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += rho[i] * phi[i];
  return sum * grid_.cell_volume();
}

Conserved HartreeSystem::conserved(const Field& u) const {
  const double p = params_.power();
  const double potential_part =
      params_.coupling == 0.0 ? 0.0 : params_.epsilon * params_.coupling / (2.0 * p) * interaction(u);
  return {mass(u), 0.5 * gradient_energy(u) + potential_part};
}

Field nonlinearity(const ModelParams& params, const Field& u) {
  return HartreeSystem(u.grid(), params).nonlinearity(u);
}

Field free_propagate(const Field& u, double t) {
  const GridSpec& g = u.grid();
  Field out(u);
  if (t == 0.0) return out;
  FftEngine fft(g);
  const RealVector k2 = squared_wavenumbers(g);
  fft.forward(out.storage());
  for (std::size_t i = 0; i < k2.size(); ++i) out[i] *= std::polar(1.0, -t * k2[i]);
  fft.inverse(out.storage());
  return out;
}

Field step_strang(const ModelParams& params, const EvolutionConfig& config, const Field& u) {
  Field out(u);
  HartreeSystem(u.grid(), params, config.weight_regularization).step(out, config.dt);
  return out;
}

Conserved conserved_quantities(const ModelParams& params, const Field& u) {
  return HartreeSystem(u.grid(), params).conserved(u);
}

double energy(const ModelParams& params, const Field& u) { return conserved_quantities(params, u).energy; }

double h1_distance(const Field& a, const Field& b) { return h1_norm(a - b); }

// ---------------------------------------------------------------------------
// Scaling

namespace {

int dyadic_exponent(const Rational& delta) {
  if (!delta.is_integer() || delta.sign() <= 0) throw std::invalid_argument("delta must be a power of two >= 1");
  Rational d = delta;
  int j = 0;
  while (d > Rational(1)) {
    d /= Rational(2);
    ++j;
  }
  if (!(d == Rational(1)) || !d.is_integer()) throw std::invalid_argument("delta must be a power of two >= 1");
  return j;
}

// Flat index of the grid point delta * x_i, or -1 if it leaves the grid.
template <class Fn>
void for_each_scaled(const GridSpec& g, int delta, Fn&& fn) {
  const int n = g.points;
  const int c = n / 2;
  std::array<int, 3> extent{1, 1, 1};
  for (int d = 0; d < g.dim; ++d) extent[d] = n;
  auto map = [&](int i) {
    const int j = c + delta * (i - c);
    return (j >= 0 && j < n) ? j : -1;
  };
  std::size_t idx = 0;
  for (int i = 0; i < extent[0]; ++i) {
    const int a = map(i);
    for (int j = 0; j < extent[1]; ++j) {
      const int b = g.dim >= 2 ? map(j) : 0;
      for (int l = 0; l < extent[2]; ++l, ++idx) {
        const int e = g.dim >= 3 ? map(l) : 0;
        if (a < 0 || b < 0 || e < 0) {
          fn(idx, -1);
          continue;
        }
        long flat = a;
        if (g.dim >= 2) flat = flat * n + b;
        if (g.dim >= 3) flat = flat * n + e;
        fn(idx, flat);
      }
    }
  }
}

// Share of the H^1 spectral mass with some |m_d| > N/4.
double outer_spectral_share(const Field& u) {
  const GridSpec& g = u.grid();
  ComplexVector spec(u.storage());
  FftEngine(g).forward(spec);
  double total = 0.0;
  double outer = 0.0;
  g.for_each_mode([&](std::size_t i, const std::array<double, 3>& k, const std::array<int, 3>& m) {
    const double w = (1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * std::norm(spec[i]);
    total += w;
    if (std::abs(m[0]) > g.points / 4 || std::abs(m[1]) > g.points / 4 || std::abs(m[2]) > g.points / 4) outer += w;
  });
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

ScalingReport scaling_covariance_check(const ModelParams& params, const Field& u0, const Rational& delta, double t,
                                       const EvolutionConfig& config, double max_tail) {
  const int j = dyadic_exponent(delta);
  const int d = 1 << j;
  const GridSpec& g = u0.grid();
  ScalingReport report;
  report.amplitude_exponent = scaling_exponents(params.pt, params.p.p).amplitude.to_double();
  const double factor = std::pow(static_cast<double>(d), report.amplitude_exponent);

  Field v0(g);
  for_each_scaled(g, d, [&](std::size_t i, long src) {
    if (src >= 0) v0[i] = factor * u0[static_cast<std::size_t>(src)];
  });
  report.rescaled_tail = outer_spectral_share(v0);
  if (report.rescaled_tail > max_tail) {
    throw std::invalid_argument("rescaled datum is not resolved: outer spectral share " +
                                std::to_string(report.rescaled_tail));
  }

  EvolutionConfig cfg = config;
  cfg.t_end = t;
  const long steps = cfg.steps();
  const HartreeSystem sys(g, params, config.weight_regularization);
  Field u = u0;
  sys.advance(u, cfg.dt, steps);
  Field v = v0;
  sys.advance(v, cfg.dt / (d * d), steps);

  Field diff(v);
  for_each_scaled(g, d, [&](std::size_t i, long src) {
    if (src >= 0) diff[i] -= factor * u[static_cast<std::size_t>(src)];
  });
  report.discrepancy = h1_norm(diff) / h1_norm(v);

  Field v_free = v0;
  sys.free_propagate(v_free, cfg.dt / (d * d) * static_cast<double>(steps));
  v_free -= v;
  report.nonlinear_share = h1_norm(v_free) / h1_norm(v);
  return report;
}

// ---------------------------------------------------------------------------
// Picard

PicardResult picard_iterate(const ModelParams& params, const Field& u0, const PicardConfig& config) {
  if (!(config.T > 0.0)) throw std::invalid_argument("T must be positive");
  if (config.nodes < 1 || config.max_iterations < 1) throw std::invalid_argument("nodes and iterations must be >= 1");
  const GridSpec& g = u0.grid();
  if (!schrodinger_admissible(g.dim, config.inv_q, config.inv_r)) {
    throw std::invalid_argument("mixed-norm pair is not admissible");
  }
  const double q = exponent_from_reciprocal(config.inv_q);
  const double r = exponent_from_reciprocal(config.inv_r);

  const HartreeSystem sys(g, params, config.weight_regularization);
  const FftEngine fft(g);
  const RealVector k2 = squared_wavenumbers(g);
  const std::size_t M = g.size();
  const int m = config.nodes;
  const double tau = config.T / m;
  const double pf = parseval_factor(g);
  const Complex coeff(0.0, -params.epsilon * params.coupling);

  ComplexVector step_phase(M);
  for (std::size_t i = 0; i < M; ++i) step_phase[i] = std::polar(1.0, -tau * k2[i]);

  ComplexVector u0_hat(u0.storage());
  fft.forward(u0_hat);

  // Iterates live in Fourier space at every node.
  std::vector<ComplexVector> iterate(static_cast<std::size_t>(m) + 1, ComplexVector(M));
  {
    ComplexVector phase(M, Complex(1.0, 0.0));
    for (int jn = 0; jn <= m; ++jn) {
      for (std::size_t i = 0; i < M; ++i) iterate[jn][i] = phase[i] * u0_hat[i];
      for (std::size_t i = 0; i < M; ++i) phase[i] *= step_phase[i];
    }
  }

  PicardResult result{{}, {}, {}, false, Field(g)};
  ComplexVector acc(M);
  ComplexVector g_prev(M);
  ComplexVector g_cur(M);
  ComplexVector phase(M);
  ComplexVector next(M);
  Field work(g);
  int above_one = 0;

  for (int k = 0; k < config.max_iterations; ++k) {
    std::fill(acc.begin(), acc.end(), Complex(0.0, 0.0));
    std::fill(phase.begin(), phase.end(), Complex(1.0, 0.0));
    double sup_h1 = 0.0;
    double sup_l2 = 0.0;
    double time_integral = 0.0;
    double prev_r_power = 0.0;
    for (int jn = 0; jn <= m; ++jn) {
      std::copy(iterate[jn].begin(), iterate[jn].end(), work.storage().begin());
      fft.inverse(work.storage());
      Field n_hat = sys.nonlinearity(work);
      fft.forward(n_hat.storage());
      // G(t_j) = S(-t_j) N^(t_j); S(-t) has symbol conj(phase).
      for (std::size_t i = 0; i < M; ++i) g_cur[i] = std::conj(phase[i]) * n_hat[i];
      if (jn > 0) {
        for (std::size_t i = 0; i < M; ++i) acc[i] += 0.5 * tau * (g_prev[i] + g_cur[i]);
      }
      double h1sq = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        next[i] = phase[i] * (u0_hat[i] + coeff * acc[i]);
        const Complex diff = next[i] - iterate[jn][i];
        h1sq += (1.0 + k2[i]) * std::norm(diff);
        work[i] = diff;
      }
      h1sq *= pf;
      fft.inverse(work.storage());
      const double l2 = lp_norm(work, 2.0);
      const double lr = lp_norm(work, r);
      sup_h1 = std::max(sup_h1, std::sqrt(h1sq));
      sup_l2 = std::max(sup_l2, l2);
      if (std::isfinite(q)) {
        const double cur = std::pow(lr, q);
        if (jn > 0) time_integral += 0.5 * tau * (prev_r_power + cur);
        prev_r_power = cur;
      } else {
        time_integral = std::max(time_integral, lr);
      }
      iterate[jn].swap(next);
      g_prev.swap(g_cur);
      for (std::size_t i = 0; i < M; ++i) phase[i] *= step_phase[i];
    }
    const double mixed_qr = std::isfinite(q) ? std::pow(time_integral, 1.0 / q) : time_integral;
    result.sup_h1_differences.push_back(sup_h1);
    result.mixed_differences.push_back(std::max(sup_l2, mixed_qr));
    if (!std::isfinite(sup_h1)) {
      result.diverged = true;
      break;
    }
    if (k > 0) {
      const double prev = result.sup_h1_differences[k - 1];
      const double ratio = prev > 0.0 ? sup_h1 / prev : 0.0;
      result.contraction_factors.push_back(ratio);
      above_one = ratio > 1.0 ? above_one + 1 : 0;
      if (above_one >= config.divergence_patience) {
        result.diverged = true;
        break;
      }
    }
  }
  std::copy(iterate[m].begin(), iterate[m].end(), result.final_state.storage().begin());
  fft.inverse(result.final_state.storage());
  return result;
}

// ---------------------------------------------------------------------------
// Mixed norms and dispersion

double strichartz_norm(std::span<const Field> snapshots, double dt, const Rational& inv_q, const Rational& inv_r) {
  if (snapshots.empty()) throw std::invalid_argument("no snapshots");
  const GridSpec& g = snapshots.front().grid();
  if (!schrodinger_admissible(g.dim, inv_q, inv_r)) {
    throw std::invalid_argument("(" + inv_q.str() + ", " + inv_r.str() + ") is not an admissible reciprocal pair");
  }
  const double q = exponent_from_reciprocal(inv_q);
  const double r = exponent_from_reciprocal(inv_r);
  if (!std::isfinite(q)) {
    double out = 0.0;
    for (const Field& u : snapshots) out = std::max(out, lp_norm(u, r));
    return out;
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  double sum = 0.0;
  for (std::size_t j = 0; j < snapshots.size(); ++j) {
    const double w = (j == 0 || j + 1 == snapshots.size()) ? 0.5 : 1.0;
    sum += w * std::pow(lp_norm(snapshots[j], r), q);
  }
  return std::pow(sum * dt, 1.0 / q);
}

double wraparound_horizon(const Field& u0, double tail) {
  const GridSpec& g = u0.grid();
  ComplexVector spec(u0.storage());
  FftEngine(g).forward(spec);
  std::vector<std::pair<double, double>> modes;
  modes.reserve(spec.size());
  double total = 0.0;
  g.for_each_mode([&](std::size_t i, const std::array<double, 3>& k, const std::array<int, 3>&) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const double w = (1.0 + k2) * std::norm(spec[i]);
    total += w;
    modes.emplace_back(std::sqrt(k2), w);
  });
  if (total == 0.0) return std::numeric_limits<double>::infinity();
  std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double outside = 0.0;
  double k_eff = 0.0;
  for (const auto& [k, w] : modes) {
    if (outside + w > tail * total) {
      k_eff = k;
      break;
    }
    outside += w;
  }
  if (k_eff == 0.0) return std::numeric_limits<double>::infinity();
  return g.half_width / (2.0 * (2.0 * k_eff));
}

ScatteringReport scattering_proxy(const ModelParams& params, const Field& u0, const std::vector<double>& times,
                                  const EvolutionConfig& config, double horizon_tail) {
  if (times.size() < 2) throw std::invalid_argument("need at least two times");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] < 0.0 || (j > 0 && !(times[j] > times[j - 1]))) {
      throw std::invalid_argument("times must be non-negative and increasing");
    }
  }
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const HartreeSystem sys(u0.grid(), params, config.weight_regularization);
  ScatteringReport report;
  report.times = times;
  report.horizon = wraparound_horizon(u0, horizon_tail);

  Field u = u0;
  double now = 0.0;
  std::optional<Field> previous;
  for (double t : times) {
    if (t > now) {
      const long steps = std::max(1L, std::lround((t - now) / config.dt));
      sys.advance(u, (t - now) / static_cast<double>(steps), steps);
      now = t;
    }
    Field w = u;
    sys.free_propagate(w, -t);
    if (previous) {
      report.differences.push_back(h1_distance(w, *previous));
      report.beyond_horizon.push_back(t > report.horizon);
    }
    previous = std::move(w);
  }
  return report;
}

DependenceReport continuous_dependence(const ModelParams& params, const Field& u0, const Field& v0,
                                       const EvolutionConfig& config) {
  const long steps = config.steps();
  const HartreeSystem sys(u0.grid(), params, config.weight_regularization);
  DependenceReport report;
  report.initial_distance = h1_distance(u0, v0);
  report.sup_distance = report.initial_distance;
  Field u = u0;
  Field v = v0;
  for (long s = 0; s < steps; ++s) {
    sys.step(u, config.dt);
    sys.step(v, config.dt);
    report.sup_distance = std::max(report.sup_distance, h1_distance(u, v));
  }
  report.constant = report.initial_distance > 0.0 ? report.sup_distance / report.initial_distance : 0.0;
  return report;
}

}  // namespace hartree
