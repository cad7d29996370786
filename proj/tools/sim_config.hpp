#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hartree/grid.hpp"
#include "hartree/sim.hpp"

namespace hartree::cli {

/// Bad configuration; `path` is a JSON pointer to the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct InitialDatum {
  double amplitude = 0.5;
  double width = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  /// Plane-wave factor e^{i k.x}.
  std::array<double, 3> momentum{0.0, 0.0, 0.0};

  [[nodiscard]] Field sample(const GridSpec& grid) const;
};

struct PicardSettings {
  PicardConfig config;
  /// Extra amplitudes for the contraction-factor sweep (may be empty).
  std::vector<double> amplitudes;
};

struct ScatteringSettings {
  /// Explicit times; when empty, `dyadic_count` times ending at the horizon.
  std::vector<double> times;
  int dyadic_count = 5;
  double horizon_tail = 1e-6;
};

struct ScalingSettings {
  Rational delta = Rational(2);
  double t = 0.25;
  double max_tail = 1e-6;
};

struct DependenceSettings {
  /// Relative size of the perturbation v0 = (1 + perturbation) u0.
  double perturbation = 1e-3;
};

struct SimulationConfig {
  GridSpec grid{3, 64, 8.0};
  ParamPoint point{3, Rational(2), Rational(1)};
  int epsilon = 1;
  KernelMode kernel = KernelMode::FreeSpaceTruncated;
  /// "half-cell", "lattice" or a number.
  std::string weight_rule = "half-cell";
  InitialDatum initial;
  EvolutionConfig evolution;
  bool write_snapshots = true;
  std::vector<std::string> diagnostics{"evolution"};
  PicardSettings picard;
  ScatteringSettings scattering;
  ScalingSettings scaling;
  DependenceSettings dependence;
  std::optional<std::string> output_directory;

  [[nodiscard]] ModelParams model() const;
  [[nodiscard]] bool wants(const std::string& diagnostic) const;
};

/// Strict parse: unknown keys, wrong types and bad values throw ConfigError.
SimulationConfig parse_simulation_config(const nlohmann::json& doc);

/// The resolved configuration, every default filled in.
nlohmann::json to_json(const SimulationConfig& config);

}  // namespace hartree::cli
