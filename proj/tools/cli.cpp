#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hartree/exponent_core.hpp"
#include "hartree/feasibility.hpp"
#include "hartree/feasibility_json.hpp"
#include "hartree/io.hpp"
#include "hartree/region.hpp"
#include "hartree/riesz.hpp"
#include "hartree/sampling.hpp"
#include "hartree/sim.hpp"
#include "sim_config.hpp"

#ifndef HARTREE_VERSION
#define HARTREE_VERSION "0.0.0"
#endif

namespace hartree::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One per process run; written last so it can list every output.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  json results = json::object();
  std::string status = "ok";
  int exit_code = kSuccess;
  double wall_time = 0.0;

  [[nodiscard]] json to_json() const {
    const char* threads = std::getenv("HARTREE_THREADS");
    return {{"tool", "hartree"},
            {"version", HARTREE_VERSION},
            {"command", command},
            {"arguments", arguments},
            {"parameters", parameters},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"threads", threads ? json(threads) : json(nullptr)},
            {"outputs", outputs},
            {"results", results},
            {"status", status},
            {"exit_code", exit_code},
            {"wall_time_seconds", wall_time}};
  }
};

class OutputDir {
 public:
  OutputDir(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

  [[nodiscard]] fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, std::string_view contents) {
    write_file_atomic(path(name), contents);
    manifest_.outputs.push_back(path(name).string());
  }

  void record(const fs::path& p) { manifest_.outputs.push_back(p.string()); }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

Rational parse_exact(const std::string& text, const char* what) {
  try {
    return Rational::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string relation_symbol(Relation r) {
  switch (r) {
    case Relation::Equality: return "=";
    case Relation::StrictLess: return "<";
    case Relation::LessEq: return "<=";
  }
  return "?";
}

/// Readable form of the reduced clauses.
std::string clause_text(const std::string& label) {
  static const std::map<std::string, std::string> names{
      {"r0-b-le-p-2", "b ≤ p−2"},
      {"r0-nr-gt-1", "n/r > 1"},
      {"r0-nr-upper", "n/r < 1 + (n−1−b)/p"},
      {"r0-adm-lower", "n/2 − 2/(2p−1) ≤ n/r"},
      {"r0-adm-upper", "n/r ≤ n/2 − 1/(2p−1)"},
  };
  const auto it = names.find(label);
  return it == names.end() ? label : it->second;
}

std::string exponent_text(const ExponentAssignment& w, Var v) {
  const auto e = w.exponent(v);
  return e ? e->str() : "inf";
}

// ---------------------------------------------------------------------------

int cmd_region(int n, int resolution, const std::optional<std::string>& svg, const std::optional<std::string>& csv,
               OutputDir& dir, RunManifest& manifest, std::ostream& out) {
  if (n < 3) throw UsageError("region: n must be at least 3");
  if (resolution < 16) throw UsageError("region: resolution must be at least 16");
  manifest.parameters = {{"n", n}, {"resolution", resolution}};
  const std::vector<RegionSample> samples = region_grid(n, resolution);
  const std::string stem = "region-n" + std::to_string(n);
  dir.write(csv.value_or(stem + ".csv"), region_csv(samples));
  dir.write(svg.value_or(stem + ".svg"), region_svg(n, samples, resolution));

  std::map<RegionLabel, std::size_t> counts;
  for (const RegionSample& s : samples) ++counts[s.label];
  out << "n = " << n << ", " << samples.size() << " samples\n";
  for (const auto& [label, count] : counts) {
    out << "  " << std::left << std::setw(16) << to_string(label) << count << '\n';
    manifest.results["counts"][std::string(to_string(label))] = count;
  }
  return kSuccess;
}

int cmd_feasible(int n, const std::string& alpha_text, const std::string& b_text, bool witness, bool as_json,
                 RunManifest& manifest, std::ostream& out) {
  if (n < 3) throw UsageError("feasible: n must be at least 3");
  const ParamPoint pt(n, parse_exact(alpha_text, "alpha"), parse_exact(b_text, "b"));
  manifest.parameters = {{"n", n}, {"alpha", pt.alpha.str()}, {"b", pt.b.str()}, {"witness", witness}};
  json report = {{"n", n}, {"alpha", pt.alpha.str()}, {"b", pt.b.str()}};

  const bool range = in_range(pt);
  report["in_range"] = range;
  if (!range) {
    report["verdict"] = "OUT OF RANGE";
    manifest.results = report;
    if (as_json) {
      out << report.dump(2) << '\n';
    } else {
      out << "point      n=" << n << " alpha=" << pt.alpha << " b=" << pt.b << '\n'
          << "in_range   no (needs " << range_alpha_lower(n) << " < alpha < " << n
          << " and 0 < b <= (alpha-n+4)/2)\n"
          << "verdict    OUT OF RANGE\n";
    }
    return kSuccess;
  }

  const Rational p = critical_power(pt).p;
  const FeasibilityVerdict reduced = reduced_feasibility(pt);
  const FeasibilityVerdict raw = raw_feasibility(pt);
  const Interval nr = reduced.inv_r_window.scaled(Rational(n));
  report["p"] = p.str();
  report["theorem_region"] = theorem_region(pt);
  report["label"] = std::string(to_string(classify(pt)));
  report["verdict"] = reduced.feasible ? "FEASIBLE" : "INFEASIBLE";
  report["raw_feasible"] = raw.feasible;
  report["n_over_r_window"] = nr.str();
  if (!reduced.feasible) {
    report["violated"] = reduced.blocking_label;
    report["violated_clause"] = clause_text(reduced.blocking_label);
    report["raw_blocking"] = raw.blocking_label;
  }

  std::optional<ExponentAssignment> w;
  std::vector<ConstraintCheck> checks;
  if (witness && reduced.feasible) {
    w = find_witness(pt);
    if (w) checks = raw_constraints(pt).evaluate(w->values);
  }

  if (as_json) {
    if (w) {
      report["witness"] = to_json(*w);
      json table = json::array();
      for (const ConstraintCheck& c : checks) {
        table.push_back({{"label", c.label},
                         {"relation", relation_symbol(c.kind)},
                         {"lhs", c.lhs.str()},
                         {"rhs", c.rhs.str()},
                         {"status", c.holds ? "PASS" : "FAIL"}});
      }
      report["constraints"] = table;
    }
    out << report.dump(2) << '\n';
  } else {
    out << "point      n=" << n << " alpha=" << pt.alpha << " b=" << pt.b << '\n';
    out << "p          " << p << '\n';
    out << "in_range   yes\n";
    out << "theorem    " << yes_no(theorem_region(pt)) << " (b <= (alpha-n+4)/n = " << theorem_upper_bound(n, pt.alpha)
        << ")\n";
    out << "label      " << to_string(classify(pt)) << '\n';
    if (reduced.feasible) {
      out << "verdict    FEASIBLE\n";
      out << "n/r window " << nr.str() << '\n';
    } else {
      out << "verdict    INFEASIBLE\n";
      out << "violated   " << clause_text(reduced.blocking_label) << " [" << reduced.blocking_label << "]\n";
      out << "raw system blocked by " << raw.blocking_label << '\n';
    }
    if (w) {
      out << "witness\n";
      for (std::size_t v = 0; v < kVarCount; ++v) {
        const Var var = static_cast<Var>(v);
        out << "  " << std::left << std::setw(7) << to_string(var) << std::setw(12) << (*w)[var].str()
            << "exponent " << exponent_text(*w, var) << '\n';
      }
      std::size_t passed = 0;
      out << "constraints\n";
      for (const ConstraintCheck& c : checks) {
        passed += c.holds ? 1 : 0;
        out << "  " << (c.holds ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.label << c.lhs << ' '
            << relation_symbol(c.kind) << ' ' << c.rhs << '\n';
      }
      out << passed << "/" << checks.size() << " constraints PASS\n";
    }
  }
  manifest.results = report;
  if (w) {
    const bool all = std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.holds; });
    manifest.results["witness_valid"] = all;
    if (!all) {
      manifest.status = "verification-failure";
      return kVerificationFailure;
    }
  }
  return kSuccess;
}

int cmd_landmarks(int n, bool as_json, RunManifest& manifest, std::ostream& out) {
  if (n < 3) throw UsageError("landmarks: n must be at least 3");
  manifest.parameters = {{"n", n}};
  const std::int64_t d = kim_radicand(n);
  const Rational shift = Rational(4 - n);
  json rows = json::array();
  for (const LandmarkPoint& lm : landmarks(n)) {
    // Boundary memberships, decided exactly.
    const QuadraticSurd range_edge = (lm.alpha + shift) * Rational(1, 2);
    const QuadraticSurd theorem_edge = (lm.alpha + shift) * Rational(1, n);
    const QuadraticSurd kim_line = lm.alpha * Rational(1, 2) + QuadraticSurd(-Rational(n - 4, 8), Rational(-1, 8), d);
    json row = {{"name", std::string(1, lm.name)},
                {"alpha", lm.alpha.str()},
                {"b", lm.b.str()},
                {"alpha_value", lm.alpha.to_double()},
                {"b_value", lm.b.to_double()},
                {"on_range_edge", lm.b.compare(range_edge) == 0},
                {"on_theorem_edge", lm.b.compare(theorem_edge) == 0},
                {"on_kim_line", lm.b.compare(kim_line) == 0}};
    if (n == 3 && lm.alpha.is_rational()) {
      const Rational a = lm.alpha.rational_part();
      const Rational gx = min((a + Rational(1)) / Rational(3), a / Rational(2));
      row["on_gx_edge"] = lm.b.compare(QuadraticSurd::rational(gx, d)) == 0;
    }
    rows.push_back(row);
  }
  manifest.results["landmarks"] = rows;
  if (as_json) {
    out << rows.dump(2) << '\n';
    return kSuccess;
  }
  for (const json& r : rows) {
    out << r["name"].get<std::string>() << "  alpha = " << r["alpha"].get<std::string>() << " ("
        << format_double(r["alpha_value"].get<double>()) << "), b = " << r["b"].get<std::string>() << " ("
        << format_double(r["b_value"].get<double>()) << ")";
    std::vector<std::string> on;
    if (r["on_range_edge"].get<bool>()) on.emplace_back("range edge");
    if (r["on_theorem_edge"].get<bool>()) on.emplace_back("theorem edge");
    if (r["on_kim_line"].get<bool>()) on.emplace_back("Kim line");
    if (r.contains("on_gx_edge") && r["on_gx_edge"].get<bool>()) on.emplace_back("gx edge");
    if (!on.empty()) {
      out << "  on";
      for (std::size_t i = 0; i < on.size(); ++i) out << (i ? ", " : " ") << on[i];
    }
    out << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// verify

int verify_reduction_suite(std::size_t samples, std::uint64_t seed, OutputDir& dir, RunManifest& manifest,
                           std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "# hartree-verify-reduction v1\n";
  csv << "n,samples,raw_feasible,witnesses_checked,equivalence_failures,witness_failures\n";
  std::optional<ReductionFailure> first;
  std::size_t failures = 0;
  for (int n = 3; n <= 8; ++n) {
    const ReductionReport rep = verify_reduction(sample_in_range(n, samples, seed + static_cast<std::uint64_t>(n)));
    csv << n << ',' << rep.samples << ',' << rep.raw_feasible << ',' << rep.witnesses_checked << ','
        << rep.equivalence_failures << ',' << rep.witness_failures << '\n';
    out << "n = " << n << ": " << rep.samples << " samples, " << rep.raw_feasible << " feasible, "
        << rep.equivalence_failures + rep.witness_failures << " failures\n";
    failures += rep.equivalence_failures + rep.witness_failures;
    if (!first && !rep.failures.empty()) first = rep.failures.front();
  }
  dir.write("verify-reduction.csv", csv.str());
  manifest.results["failures"] = failures;
  if (first) {
    err << "first failure: n=" << first->pt.n << " alpha=" << first->pt.alpha << " b=" << first->pt.b << " "
        << first->kind << ": " << first->detail << '\n';
  }
  return failures == 0 ? kSuccess : kVerificationFailure;
}

int verify_redundancy_suite(std::size_t samples, std::uint64_t seed, OutputDir& dir, RunManifest& manifest,
                            std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "# hartree-verify-redundancy v1\n";
  csv << "n,check,evaluated,violations\n";
  std::size_t failures = 0;
  std::optional<std::string> first;
  for (int n = 3; n <= 8; ++n) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
    for (const ParamPoint& pt : sample_in_range(n, samples, seed + static_cast<std::uint64_t>(n))) {
      for (const ImplicationCheck& c : verify_redundancy_claims(pt).checks) {
        auto& [evaluated, violated] = tally[c.label];
        ++evaluated;
        if (!c.holds) {
          ++violated;
          if (!first) first = c.label + " at n=" + std::to_string(n) + " alpha=" + pt.alpha.str() + " b=" + pt.b.str();
        }
      }
    }
    std::size_t bad = 0;
    for (const auto& [label, t] : tally) {
      csv << n << ',' << label << ',' << t.first << ',' << t.second << '\n';
      bad += t.second;
    }
    out << "n = " << n << ": " << tally.size() << " implications on " << samples << " samples, " << bad
        << " violations\n";
    failures += bad;
  }
  dir.write("verify-redundancy.csv", csv.str());
  manifest.results["failures"] = failures;
  if (first) err << "first failure: " << *first << '\n';
  return failures == 0 ? kSuccess : kVerificationFailure;
}

int verify_coverage_suite(std::size_t samples, std::uint64_t seed, OutputDir& dir, RunManifest& manifest,
                          std::ostream& out, std::ostream& err) {
  std::ostringstream csv;
  csv << "# hartree-verify-coverage v1\n";
  csv << "n,label,count\n";
  std::size_t open = 0;
  for (int n : {5, 6}) {
    const CoverageReport rep = verify_coverage(n, samples, std::max<std::size_t>(samples / 10, 1), seed);
    for (const auto& [label, count] : rep.counts) csv << n << ',' << to_string(label) << ',' << count << '\n';
    out << "n = " << n << ": " << rep.interior_samples << " interior + " << rep.boundary_samples
        << " boundary samples, " << rep.open_count() << " Open\n";
    open += rep.open_count();
    if (!rep.open_points.empty()) {
      const ParamPoint& pt = rep.open_points.front();
      err << "first failure: Open at n=" << pt.n << " alpha=" << pt.alpha << " b=" << pt.b << '\n';
    }
  }
  dir.write("verify-coverage56.csv", csv.str());
  manifest.results["open"] = open;
  return open == 0 ? kSuccess : kVerificationFailure;
}

/// Dilation invariance of a scale-free quotient over random dilations in
/// [1/2, 2], measured against lambda = 1.
template <typename Ratio>
int verify_dilation_suite(const std::string& name, std::size_t samples, std::uint64_t seed, double tolerance,
                          const Ratio& ratio, OutputDir& dir, RunManifest& manifest, std::ostream& out,
                          std::ostream& err) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_lambda(std::log(0.5), std::log(2.0));
  const double reference = ratio(1.0);
  std::ostringstream csv;
  csv << "# hartree-verify-" << name << " v1\n";
  csv << "lambda,ratio,relative_deviation,status\n";
  csv << "1," << format_double(reference) << ",0,PASS\n";
  std::size_t failures = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double lambda = std::exp(log_lambda(rng));
    const double r = ratio(lambda);
    const double dev = std::abs(r / reference - 1.0);
    const bool ok = std::isfinite(r) && r > 0.0 && dev <= tolerance;
    worst = std::max(worst, dev);
    csv << format_double(lambda) << ',' << format_double(r) << ',' << format_double(dev) << ','
        << (ok ? "PASS" : "FAIL") << '\n';
    if (!ok && failures++ == 0) {
      err << "first failure: lambda=" << lambda << " ratio " << r << " deviates " << dev << " from " << reference
          << '\n';
    }
  }
  dir.write("verify-" + name + ".csv", csv.str());
  out << name << ": reference ratio " << reference << ", worst relative deviation " << worst << " over " << samples
      << " dilations (tolerance " << tolerance << ")\n";
  manifest.results = {{"reference", reference}, {"worst_deviation", worst}, {"failures", failures}};
  return failures == 0 ? kSuccess : kVerificationFailure;
}

int cmd_verify(const std::string& suite, std::optional<std::size_t> samples, std::uint64_t seed, int points,
               OutputDir& dir, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  manifest.seed = seed;
  manifest.parameters = {{"suite", suite}, {"seed", seed}};
  if (suite == "reduction") {
    manifest.parameters["samples"] = samples.value_or(10000);
    return verify_reduction_suite(samples.value_or(10000), seed, dir, manifest, out, err);
  }
  if (suite == "redundancy") {
    manifest.parameters["samples"] = samples.value_or(1000);
    return verify_redundancy_suite(samples.value_or(1000), seed, dir, manifest, out, err);
  }
  if (suite == "coverage56") {
    manifest.parameters["samples"] = samples.value_or(10000);
    return verify_coverage_suite(samples.value_or(10000), seed, dir, manifest, out, err);
  }
  const std::size_t count = samples.value_or(3);
  manifest.parameters["samples"] = count;
  manifest.parameters["points"] = points;
  if (suite == "hls") {
    // ||f (I_2 * f)||_2 / ||f||_{12/7}^2 in three dimensions.
    const GridSpec grid(3, points, 16.0);
    const RieszSpec spec = RieszSpec::make(3, 2.0);
    auto ratio = [&](double lambda) {
      const double inv = lambda * lambda / 2.0;
      RealVector f(grid.size());
      grid.for_each_point([&](std::size_t i, const std::array<double, 3>& x) {
        f[i] = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * inv);
      });
      return hls_ratio(spec, grid, f, f, 2.0, 12.0 / 7.0, 12.0 / 7.0);
    };
    return verify_dilation_suite("hls", count, seed, 1e-2, ratio, dir, manifest, out, err);
  }
  if (suite == "ckn") {
    // || |x|^{-1/2} f ||_3 / ||grad f||_2 in three dimensions.
    const GridSpec grid(3, points, 6.0);
    auto ratio = [&](double lambda) {
      const double inv = lambda * lambda / 2.0;
      const Field f = Field::from_function(grid, [&](const std::array<double, 3>& x) {
        return Complex(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * inv), 0.0);
      });
      return ckn_ratio(f, 2.0, 3.0, -0.5);
    };
    return verify_dilation_suite("ckn", count, seed, 1e-2, ratio, dir, manifest, out, err);
  }
  throw UsageError("verify: unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------------------
// simulate

std::string picard_rows(double amplitude, const PicardResult& r) {
  std::ostringstream csv;
  for (std::size_t k = 0; k < r.sup_h1_differences.size(); ++k) {
    csv << format_double(amplitude) << ',' << k << ',' << format_double(r.sup_h1_differences[k]) << ','
        << format_double(r.mixed_differences[k]) << ','
        << (k == 0 ? std::string() : format_double(r.contraction_factors[k - 1])) << '\n';
  }
  return csv.str();
}

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

int cmd_simulate(const std::string& config_path, bool dry_run, const std::optional<std::string>& out_dir_flag,
                 RunManifest& manifest, std::optional<OutputDir>& dir_slot, std::ostream& out) {
  std::ifstream in(config_path);
  if (!in) throw UsageError("simulate: cannot read " + config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("simulate: " + config_path + " is not valid JSON: " + e.what());
  }
  SimulationConfig cfg;
  try {
    cfg = parse_simulation_config(doc);
  } catch (const ConfigError& e) {
    throw UsageError(std::string("simulate: invalid config at ") + e.what());
  }
  const fs::path run_dir = out_dir_flag ? fs::path(*out_dir_flag) : fs::path(cfg.output_directory.value_or("hartree-run"));
  dir_slot.emplace(run_dir, manifest);
  OutputDir& dir = *dir_slot;
  manifest.parameters = to_json(cfg);
  manifest.parameters["config_file"] = config_path;
  if (dry_run) {
    manifest.status = "dry-run";
    out << "dry run: configuration valid, manifest only\n";
    return kSuccess;
  }

  const ModelParams model = cfg.model();
  if (model.toy_mode()) out << "note: grid dimension " << cfg.grid.dim << " is a toy mode outside the theorem's hypotheses\n";
  const Field u0 = cfg.initial.sample(cfg.grid);

  if (cfg.wants("evolution")) {
    const HartreeSystem sys(cfg.grid, model, cfg.evolution.weight_regularization);
    const Trajectory traj = sys.evolve(u0, cfg.evolution);
    dir.write("diagnostics.csv", diagnostics_csv(traj.diagnostics));
    if (cfg.write_snapshots) {
      const json meta = {{"params", manifest.parameters["params"]}};
      for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::ostringstream name;
        name << "snapshots/snap_" << std::setw(6) << std::setfill('0') << i << ".hsnap";
        write_snapshot(dir.path(name.str()), traj.snapshots[i].field, traj.snapshots[i].time, meta);
        dir.record(dir.path(name.str()));
      }
      write_snapshot(dir.path("final.hsnap"), traj.final_state, cfg.evolution.t_end, meta);
      dir.record(dir.path("final.hsnap"));
    }
    const DiagnosticsRow& first = traj.diagnostics.front();
    const DiagnosticsRow& last = traj.diagnostics.back();
    const double mass_drift = std::abs(last.mass - first.mass) / first.mass;
    const double energy_drift = std::abs(last.energy - first.energy) / std::abs(first.energy);
    manifest.results["evolution"] = {{"mass_drift", mass_drift}, {"energy_drift", energy_drift}, {"steps", last.step}};
    out << "evolution: " << last.step << " steps to t = " << last.time << ", mass drift " << mass_drift
        << ", energy drift " << energy_drift << '\n';
  }

  if (cfg.wants("picard")) {
    std::ostringstream csv;
    csv << "# hartree-picard v1\n";
    csv << "amplitude,iteration,sup_h1_difference,mixed_difference,contraction_factor\n";
    const PicardResult base = picard_iterate(model, u0, cfg.picard.config);
    csv << picard_rows(cfg.initial.amplitude, base);
    json factors = base.contraction_factors;
    manifest.results["picard"] = {{"contraction_factors", factors}, {"diverged", base.diverged}};
    out << "picard: " << base.sup_h1_differences.size() << " iterations, factors";
    for (double f : base.contraction_factors) out << ' ' << f;
    out << (base.diverged ? " (diverged)" : "") << '\n';

    if (!cfg.picard.amplitudes.empty()) {
      std::vector<double> amps{cfg.initial.amplitude};
      std::vector<double> first_factor{base.contraction_factors.empty() ? NAN : base.contraction_factors.front()};
      for (double a : cfg.picard.amplitudes) {
        InitialDatum datum = cfg.initial;
        datum.amplitude = a;
        const PicardResult r = picard_iterate(model, datum.sample(cfg.grid), cfg.picard.config);
        csv << picard_rows(a, r);
        amps.push_back(a);
        first_factor.push_back(r.contraction_factors.empty() ? NAN : r.contraction_factors.front());
      }
      const double slope = loglog_slope(amps, first_factor);
      manifest.results["picard"]["sweep_slope"] = slope;
      out << "picard sweep: log-log slope of the first contraction factor " << slope << " (2p-2 = "
          << 2.0 * model.power() - 2.0 << ")\n";
    }
    dir.write("picard.csv", csv.str());
  }

  if (cfg.wants("scattering")) {
    std::vector<double> times = cfg.scattering.times;
    if (times.empty()) {
      const double horizon = wraparound_horizon(u0, cfg.scattering.horizon_tail);
      for (int j = 0; j < cfg.scattering.dyadic_count; ++j) {
        times.push_back(horizon * std::ldexp(1.0, j - (cfg.scattering.dyadic_count - 1)));
      }
    }
    const ScatteringReport rep =
        scattering_proxy(model, u0, times, cfg.evolution, cfg.scattering.horizon_tail);
    std::ostringstream csv;
    csv << "# hartree-scattering v1\n";
    csv << "t_from,t_to,difference,beyond_horizon\n";
    for (std::size_t j = 0; j < rep.differences.size(); ++j) {
      csv << format_double(times[j]) << ',' << format_double(times[j + 1]) << ','
          << format_double(rep.differences[j]) << ',' << (rep.beyond_horizon[j] ? 1 : 0) << '\n';
    }
    dir.write("scattering.csv", csv.str());
    manifest.results["scattering"] = {{"horizon", rep.horizon}, {"differences", rep.differences}};
    out << "scattering: horizon " << rep.horizon << ", differences";
    for (double d : rep.differences) out << ' ' << d;
    out << '\n';
  }

  if (cfg.wants("scaling")) {
    const ScalingReport rep =
        scaling_covariance_check(model, u0, cfg.scaling.delta, cfg.scaling.t, cfg.evolution, cfg.scaling.max_tail);
    std::ostringstream csv;
    csv << "# hartree-scaling v1\n";
    csv << "delta,t,discrepancy,nonlinear_share,amplitude_exponent,rescaled_tail\n";
    csv << cfg.scaling.delta << ',' << format_double(cfg.scaling.t) << ',' << format_double(rep.discrepancy) << ','
        << format_double(rep.nonlinear_share) << ',' << format_double(rep.amplitude_exponent) << ','
        << format_double(rep.rescaled_tail) << '\n';
    dir.write("scaling.csv", csv.str());
    manifest.results["scaling"] = {{"discrepancy", rep.discrepancy}, {"nonlinear_share", rep.nonlinear_share}};
    out << "scaling: relative H1 discrepancy " << rep.discrepancy << " (nonlinear share " << rep.nonlinear_share
        << ")\n";
  }

  if (cfg.wants("dependence")) {
    const Field v0 = u0 * Complex(1.0 + cfg.dependence.perturbation, 0.0);
    const DependenceReport rep = continuous_dependence(model, u0, v0, cfg.evolution);
    std::ostringstream csv;
    csv << "# hartree-dependence v1\n";
    csv << "initial_distance,sup_distance,constant\n";
    csv << format_double(rep.initial_distance) << ',' << format_double(rep.sup_distance) << ','
        << format_double(rep.constant) << '\n';
    dir.write("dependence.csv", csv.str());
    manifest.results["dependence"] = {{"constant", rep.constant}};
    out << "dependence: sup distance / initial distance = " << rep.constant << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponent feasibility, region diagrams and Hartree simulations", "hartree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HARTREE_VERSION);

  std::string out_dir = ".";
  bool as_json = false;

  int n = 3;
  int resolution = 64;
  std::optional<std::string> svg;
  std::optional<std::string> csv;
  auto* region = app.add_subcommand("region", "Region diagram (SVG) and labelled sample grid (CSV)");
  region->add_option("n", n, "Dimension (>= 3)")->required();
  region->add_option("--resolution", resolution, "Samples per axis (>= 16)");
  region->add_option("--svg", svg, "SVG file name inside --out-dir");
  region->add_option("--csv", csv, "CSV file name inside --out-dir");
  region->add_option("--out-dir", out_dir, "Output directory");

  std::string alpha_text;
  std::string b_text;
  bool witness = false;
  auto* feasible = app.add_subcommand("feasible", "Decide whether exponents exist for (n, alpha, b)");
  feasible->add_option("n", n, "Dimension (>= 3)")->required();
  feasible->add_option("alpha", alpha_text, "Rational, a/b or integer")->required();
  feasible->add_option("b", b_text, "Rational, a/b or integer")->required();
  feasible->add_flag("--witness", witness, "Print the witness and every raw constraint");
  feasible->add_flag("--json", as_json, "Machine-readable report");
  feasible->add_option("--out-dir", out_dir, "Directory for the manifest");

  std::string suite;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 7;
  int points = 128;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "reduction | redundancy | coverage56 | hls | ckn")
      ->required()
      ->check(CLI::IsMember({"reduction", "redundancy", "coverage56", "hls", "ckn"}));
  verify->add_option("--samples", samples, "Samples per dimension (dilations for hls/ckn)");
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--points", points, "Grid points per axis for hls/ckn");
  verify->add_option("--out-dir", out_dir, "Directory for findings and the manifest");

  std::string config_path;
  bool dry_run = false;
  std::optional<std::string> run_dir;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation from a JSON configuration");
  simulate->add_option("config", config_path, "JSON configuration file")->required();
  simulate->add_flag("--dry-run", dry_run, "Validate and write the manifest only");
  simulate->add_option("--out-dir", run_dir, "Run directory (overrides output.directory)");

  auto* marks = app.add_subcommand("landmarks", "Captioned landmark points with exact coordinates");
  marks->add_option("n", n, "Dimension (>= 3)")->required();
  marks->add_flag("--json", as_json, "JSON output");
  marks->add_option("--out-dir", out_dir, "Directory for the manifest");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kSuccess;
    }
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.arguments = args;
  std::optional<OutputDir> dir;
  int code = kSuccess;
  try {
    if (region->parsed()) {
      manifest.command = "region";
      dir.emplace(out_dir, manifest);
      code = cmd_region(n, resolution, svg, csv, *dir, manifest, out);
    } else if (feasible->parsed()) {
      manifest.command = "feasible";
      dir.emplace(out_dir, manifest);
      code = cmd_feasible(n, alpha_text, b_text, witness, as_json, manifest, out);
    } else if (verify->parsed()) {
      manifest.command = "verify";
      dir.emplace(out_dir, manifest);
      code = cmd_verify(suite, samples, seed, points, *dir, manifest, out, err);
    } else if (simulate->parsed()) {
      manifest.command = "simulate";
      code = cmd_simulate(config_path, dry_run, run_dir, manifest, dir, out);
    } else if (marks->parsed()) {
      manifest.command = "landmarks";
      dir.emplace(out_dir, manifest);
      code = cmd_landmarks(n, as_json, manifest, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    manifest.status = "usage-error";
    code = kUsageError;
  } catch (const NumericalAbort& e) {
    err << "numerical abort at t = " << e.time() << " (step " << e.step() << "): " << e.what() << '\n';
    manifest.status = "numerical-abort";
    manifest.results["abort"] = {{"time", e.time()}, {"step", e.step()}, {"message", e.what()}};
    code = kNumericalAbort;
  } catch (const std::exception& e) {
    // Rejected inputs (e.g. an unresolved rescaled datum) and I/O trouble.
    err << "error: " << e.what() << '\n';
    manifest.status = "error";
    manifest.results["error"] = e.what();
    code = kUsageError;
  }

  if (code == kVerificationFailure) manifest.status = "verification-failure";
  manifest.exit_code = code;
  manifest.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (dir) {
    try {
      const std::string name = manifest.command == "simulate" ? "manifest.json" : manifest.command + ".manifest.json";
      write_file_atomic(dir->path(name), manifest.to_json().dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: cannot write manifest: " << e.what() << '\n';
      if (code == kSuccess) code = kUsageError;
    }
  }
  return code;
}

}  // namespace hartree::cli
