#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hartree/io.hpp"
#include "hartree/region.hpp"

using namespace hartree;
namespace fs = std::filesystem;

TEST_CASE("snapshot round trip") {
  const fs::path dir = fs::temp_directory_path() / "hartree-io-test";
  fs::remove_all(dir);
  const GridSpec g(3, 8, 2.0);
  const Field u = Field::from_function(g, [](const std::array<double, 3>& x) { return Complex(x[0], x[1] * x[2]); });
  write_snapshot(dir / "a" / "u.hsnap", u, 0.25, {{"note", "x"}});
  const LoadedSnapshot s = read_snapshot(dir / "a" / "u.hsnap");
  CHECK(s.time == 0.25);
  CHECK(s.header["metadata"]["note"] == "x");
  CHECK(s.header["grid"]["points"] == 8);
  CHECK(s.header["norms"]["mass"].get<double>() == doctest::Approx(mass(u)));
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(s.field[i] == u[i]);
  // No temporaries are left behind.
  CHECK(std::distance(fs::directory_iterator(dir / "a"), fs::directory_iterator()) == 1);

  std::ofstream(dir / "bad.hsnap") << "not a snapshot";
  CHECK_THROWS(read_snapshot(dir / "bad.hsnap"));
}

TEST_CASE("diagnostics csv") {
  const std::string csv = diagnostics_csv({{0, 0.0, 2.0, -1.0, 3.0}, {10, 0.5, 2.0 + 2e-12, -1.5, 3.0}});
  CHECK(csv ==
        "# hartree-diagnostics v1\n"
        "step,time,mass,energy,h1,mass_drift,energy_drift\n"
        "0,0,2,-1,3,0,0\n"
        "10,0.5,2.000000000002,-1.5,3," +
            format_double(std::abs((2.0 + 2e-12) - 2.0) / 2.0) + ",0.5\n");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("region grid stays in range") {
  const auto samples = region_grid(4, 16);
  CHECK(samples.size() == 15 * 16);
  for (const RegionSample& s : samples) {
    const ParamPoint pt(4, s.alpha, s.b);
    CHECK(in_range(pt));
    CHECK(s.label == classify(pt));
  }
  CHECK_THROWS_AS(region_grid(2, 16), std::invalid_argument);
  CHECK_THROWS_AS(region_grid(3, 15), std::invalid_argument);
  const std::string svg = region_svg(4, samples, 16);
  CHECK(svg.find("id=\"landmark-I\" data-alpha=\"2/3\" data-b=\"1/6\"") != std::string::npos);
  CHECK(svg.find("id=\"kim-line\"") != std::string::npos);
}

TEST_CASE("coverage counts") {
  const CoverageReport five = verify_coverage(5, 300, 100, 11);
  CHECK(five.interior_samples == 300);
  CHECK(five.boundary_samples >= 200);
  CHECK(five.open_count() == 0);
  // n = 4 has a gap, and random sampling finds it.
  const CoverageReport four = verify_coverage(4, 2000, 0, 11);
  CHECK(four.open_count() > 0);
  REQUIRE_FALSE(four.open_points.empty());
  CHECK(classify(four.open_points.front()) == RegionLabel::Open);
}
