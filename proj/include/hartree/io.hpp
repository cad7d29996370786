#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "hartree/grid.hpp"
#include "hartree/sim.hpp"

namespace hartree {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never see a partial file. Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Binary snapshot: the line "HSNAP1", a little-endian u64 header length, a
/// JSON header (grid, time, norms, caller metadata) and the samples as
/// interleaved doubles in grid order.
void write_snapshot(const std::filesystem::path& path, const Field& u, double time, const nlohmann::json& metadata);

struct LoadedSnapshot {
  Field field;
  double time = 0.0;
  nlohmann::json header;
};

LoadedSnapshot read_snapshot(const std::filesystem::path& path);

nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& doc);

/// "# hartree-diagnostics v1" then step,time,mass,energy,h1,mass_drift,energy_drift.
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace hartree
