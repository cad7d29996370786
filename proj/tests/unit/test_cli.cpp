#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cli.hpp"
#include "hartree/rational.hpp"

using hartree::Rational;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = hartree::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hartree-cli-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CsvRow {
  Rational alpha;
  Rational b;
  std::string label;
};

std::vector<CsvRow> read_region_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "# hartree-region-csv v1");
  std::getline(in, line);
  REQUIRE(line == "alpha,b,alpha_value,b_value,label");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 5);
    rows.push_back({Rational::parse(cells[0]), Rational::parse(cells[1]), cells[4]});
  }
  return rows;
}

nlohmann::json manifest(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("feasible reports verdicts and the witness table") {
  const fs::path dir = scratch("feasible");
  const Outcome ok = run({"feasible", "3", "2", "1", "--witness", "--out-dir", dir.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verdict    FEASIBLE") != std::string::npos);
  CHECK(ok.out.find("55/55 constraints PASS") != std::string::npos);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(fs::exists(dir / "feasible.manifest.json"));

  const Outcome no = run({"feasible", "5", "3", "1/2", "--out-dir", dir.string()});
  CHECK(no.code == 0);
  CHECK(no.out.find("INFEASIBLE") != std::string::npos);
  CHECK(no.out.find("b ≤ p−2") != std::string::npos);

  // (4, 2, 1/2): b equals (alpha - n + 4)/n exactly.
  const Outcome edge = run({"feasible", "4", "2", "1/2", "--json", "--out-dir", dir.string()});
  CHECK(edge.code == 0);
  const auto report = nlohmann::json::parse(edge.out);
  CHECK(report["verdict"] == "FEASIBLE");
  CHECK(Rational::parse(report["b"].get<std::string>()) == (Rational(2) - Rational(4) + Rational(4)) / Rational(4));

  CHECK(run({"feasible", "3", "2.0", "1", "--out-dir", dir.string()}).code == 2);
  CHECK(run({"feasible", "3", "2"}).code == 2);
  const Outcome outside = run({"feasible", "3", "4", "1", "--out-dir", dir.string()});
  CHECK(outside.out.find("OUT OF RANGE") != std::string::npos);
}

TEST_CASE("region diagrams") {
  const fs::path dir = scratch("region");
  REQUIRE(run({"region", "5", "--resolution", "32", "--out-dir", dir.string()}).code == 0);
  const auto five = read_region_csv(dir / "region-n5.csv");
  CHECK(five.size() == 31 * 32);
  for (const CsvRow& r : five) CHECK((r.label == "ThisPaper" || r.label == "Kim"));

  // Rerunning an exact command reproduces its files byte for byte.
  const std::string first = slurp(dir / "region-n5.csv");
  REQUIRE(run({"region", "5", "--resolution", "32", "--out-dir", dir.string()}).code == 0);
  CHECK(slurp(dir / "region-n5.csv") == first);
  CHECK(slurp(dir / "region-n5.svg").find("id=\"theorem-edge\"") != std::string::npos);

  // M = (2, 1) sits on the upper edge min{(alpha+1)/3, alpha/2} of the n = 3
  // Guzman-Xu region.
  REQUIRE(run({"region", "3", "--out-dir", dir.string()}).code == 0);
  const std::string svg = slurp(dir / "region-n3.svg");
  CHECK(svg.find("id=\"landmark-M\" data-alpha=\"2\" data-b=\"1\"") != std::string::npos);
  const Rational a(2);
  CHECK(std::min((a + Rational(1)) / Rational(3), a / Rational(2)) == Rational(1));

  // n = 4 keeps an open set next to I = (2/3, 1/6).
  REQUIRE(run({"region", "4", "--resolution", "64", "--out-dir", dir.string()}).code == 0);
  bool open_near_i = false;
  for (const CsvRow& r : read_region_csv(dir / "region-n4.csv")) {
    if (r.label != "Open") continue;
    const double da = r.alpha.to_double() - 2.0 / 3.0;
    const double db = r.b.to_double() - 1.0 / 6.0;
    open_near_i = open_near_i || da * da + db * db < 0.01;
  }
  CHECK(open_near_i);

  const auto m = manifest(dir / "region.manifest.json");
  CHECK(m["command"] == "region");
  CHECK(m["outputs"].size() == 2);
  CHECK(run({"region", "2", "--out-dir", dir.string()}).code == 2);
  CHECK(run({"region", "4", "--resolution", "8", "--out-dir", dir.string()}).code == 2);
}

TEST_CASE("verify suites") {
  const fs::path dir = scratch("verify");
  const Outcome red = run({"verify", "reduction", "--samples", "300", "--seed", "7", "--out-dir", dir.string()});
  CHECK(red.code == 0);
  CHECK(slurp(dir / "verify-reduction.csv").rfind("# hartree-verify-reduction v1\n", 0) == 0);
  const auto m = manifest(dir / "verify.manifest.json");
  CHECK(m["seed"] == 7);
  CHECK(m["results"]["failures"] == 0);

  CHECK(run({"verify", "redundancy", "--samples", "100", "--out-dir", dir.string()}).code == 0);
  CHECK(run({"verify", "coverage56", "--samples", "500", "--out-dir", dir.string()}).code == 0);
  CHECK(run({"verify", "hls", "--samples", "1", "--points", "64", "--out-dir", dir.string()}).code == 0);
  CHECK(run({"verify", "nonsense", "--out-dir", dir.string()}).code == 2);
}

TEST_CASE("landmarks") {
  const fs::path dir = scratch("landmarks");
  const Outcome o = run({"landmarks", "3", "--json", "--out-dir", dir.string()});
  REQUIRE(o.code == 0);
  const auto rows = nlohmann::json::parse(o.out);
  bool saw_m = false;
  for (const auto& r : rows) {
    if (r["name"] == "M") {
      saw_m = true;
      CHECK(r["on_gx_edge"] == true);
      CHECK(r["on_theorem_edge"] == true);
    }
    if (r["name"] == "B" || r["name"] == "D") CHECK(r["on_kim_line"] == true);
    if (r["name"] == "J") CHECK(r["on_theorem_edge"] == true);
  }
  CHECK(saw_m);
}

TEST_CASE("simulate") {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = dir / "small.json";
  write(cfg, R"({"grid": {"points": 32, "half_width": 6},
                 "params": {"alpha": 2, "b": 1},
                 "initial": {"amplitude": 0.5},
                 "evolution": {"dt": 0.01, "t_end": 0.1, "diagnostics_every": 5, "snapshot_every": 5},
                 "diagnostics": ["evolution", "picard"],
                 "picard": {"T": 0.2, "nodes": 16, "max_iterations": 5}})");
  const fs::path run_dir = dir / "run";
  const Outcome o = run({"simulate", cfg.string(), "--out-dir", run_dir.string()});
  REQUIRE(o.code == 0);

  // Mass drift column of the diagnostics CSV.
  std::istringstream diag(slurp(run_dir / "diagnostics.csv"));
  std::string line;
  std::getline(diag, line);
  CHECK(line == "# hartree-diagnostics v1");
  std::getline(diag, line);
  int rows = 0;
  while (std::getline(diag, line)) {
    const std::string drift = line.substr(0, line.rfind(','));
    CHECK(std::stod(drift.substr(drift.rfind(',') + 1)) < 1e-10);
    ++rows;
  }
  CHECK(rows == 3);

  std::istringstream picard(slurp(run_dir / "picard.csv"));
  std::getline(picard, line);
  std::getline(picard, line);
  CHECK(line == "amplitude,iteration,sup_h1_difference,mixed_difference,contraction_factor");
  int factors = 0;
  while (std::getline(picard, line)) {
    const std::string last = line.substr(line.rfind(',') + 1);
    if (last.empty()) continue;
    CHECK(std::stod(last) < 1.0);
    ++factors;
  }
  CHECK(factors == 4);

  const auto m = manifest(run_dir / "manifest.json");
  CHECK(m["status"] == "ok");
  CHECK(m["parameters"]["params"]["p"] == "3");
  CHECK(fs::exists(run_dir / "snapshots" / "snap_000002.hsnap"));
  for (const auto& p : m["outputs"]) CHECK(fs::exists(p.get<std::string>()));

  const fs::path dry = dir / "dry";
  CHECK(run({"simulate", cfg.string(), "--dry-run", "--out-dir", dry.string()}).code == 0);
  CHECK(std::distance(fs::directory_iterator(dry), fs::directory_iterator()) == 1);
  CHECK(manifest(dry / "manifest.json")["status"] == "dry-run");

  write(dir / "typo.json", R"({"evolution": {"dt": 0.01, "tend": 1}})");
  const Outcome typo = run({"simulate", (dir / "typo.json").string(), "--out-dir", (dir / "typo").string()});
  CHECK(typo.code == 2);
  CHECK(typo.err.find("/evolution/tend") != std::string::npos);
  write(dir / "float.json", R"({"params": {"b": 0.5}})");
  CHECK(run({"simulate", (dir / "float.json").string(), "--out-dir", (dir / "float").string()}).code == 2);

  // Large focusing data outruns the grid.
  write(dir / "blowup.json", R"({"grid": {"points": 32}, "params": {"epsilon": -1},
                                 "initial": {"amplitude": 30},
                                 "evolution": {"dt": 0.05, "t_end": 1, "diagnostics_every": 2}})");
  const fs::path blow = dir / "blowup";
  CHECK(run({"simulate", (dir / "blowup.json").string(), "--out-dir", blow.string()}).code == 3);
  CHECK(manifest(blow / "manifest.json")["status"] == "numerical-abort");
}
