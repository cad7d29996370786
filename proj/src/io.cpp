#include "hartree/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace hartree {

namespace {

constexpr std::string_view kSnapshotMagic = "HSNAP1\n";

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

nlohmann::json to_json(const GridSpec& grid) {
  return {{"dim", grid.dim}, {"points", grid.points}, {"half_width", grid.half_width}};
}

GridSpec grid_from_json(const nlohmann::json& doc) {
  return GridSpec(doc.at("dim").get<int>(), doc.at("points").get<int>(), doc.at("half_width").get<double>());
}

void write_snapshot(const std::filesystem::path& path, const Field& u, double time, const nlohmann::json& metadata) {
  nlohmann::json header = {{"format", "hsnap"},
                           {"version", 1},
                           {"grid", to_json(u.grid())},
                           {"time", time},
                           {"norms", {{"mass", mass(u)}, {"h1", h1_norm(u)}}},
                           {"metadata", metadata}};
  const std::string text = header.dump();
  const std::uint64_t length = text.size();
  std::string blob;
  blob.reserve(kSnapshotMagic.size() + sizeof(length) + text.size() + u.size() * sizeof(Complex));
  blob.append(kSnapshotMagic);
  blob.append(reinterpret_cast<const char*>(&length), sizeof(length));
  blob.append(text);
  blob.append(reinterpret_cast<const char*>(u.storage().data()), u.size() * sizeof(Complex));
  write_file_atomic(path, blob);
}

LoadedSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic(kSnapshotMagic.size(), '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (magic != kSnapshotMagic) throw std::runtime_error(path.string() + " is not a snapshot file");
  std::uint64_t length = 0;
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (!in || length > (1u << 24)) throw std::runtime_error("corrupt snapshot header in " + path.string());
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  nlohmann::json header = nlohmann::json::parse(text);
  const GridSpec grid = grid_from_json(header.at("grid"));
  Field field(grid);
  in.read(reinterpret_cast<char*>(field.storage().data()), static_cast<std::streamsize>(field.size() * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated snapshot " + path.string());
  const double time = header.at("time").get<double>();
  return {std::move(field), time, std::move(header)};
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::ostringstream out;
  out << "# hartree-diagnostics v1\n";
  out << "step,time,mass,energy,h1,mass_drift,energy_drift\n";
  if (rows.empty()) return out.str();
  const double m0 = rows.front().mass;
  const double e0 = rows.front().energy;
  for (const DiagnosticsRow& r : rows) {
    const double md = m0 != 0.0 ? std::abs(r.mass - m0) / std::abs(m0) : std::abs(r.mass - m0);
    const double ed = e0 != 0.0 ? std::abs(r.energy - e0) / std::abs(e0) : std::abs(r.energy - e0);
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.mass) << ',' << format_double(r.energy)
        << ',' << format_double(r.h1) << ',' << format_double(md) << ',' << format_double(ed) << '\n';
  }
  return out.str();
}

}  // namespace hartree
