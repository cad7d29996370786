#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hartree/feasibility.hpp"
#include "hartree/feasibility_json.hpp"
#include "hartree/sampling.hpp"

using namespace hartree;

namespace {

ParamPoint pt(int n, const char* alpha, const char* b) {
  return ParamPoint(n, Rational::parse(alpha), Rational::parse(b));
}

Rational R(const char* text) { return Rational::parse(text); }

}  // namespace

TEST_CASE("raw system for (3, 2, 1) has the frozen shape") {
  const ConstraintSet raw = raw_constraints(pt(3, "2", "1"));
  CHECK(raw.constraints.size() == 55);
  CHECK(raw.p == Rational(3));
  CHECK(raw.labels().size() == raw.constraints.size());
  int equalities = 0;
  int redundant = 0;
  for (const auto& c : raw.constraints) {
    if (c.kind == Relation::Equality) ++equalities;
    if (c.redundant) ++redundant;
  }
  // Two admissibility rows, the time relation, two Hoelder rows, six weighted
  // Sobolev rows and the two split identities.
  CHECK(equalities == 13);
  CHECK(redundant == 2);
  CHECK(raw.find("split-r1")->redundant);
  CHECK(raw.find("split-r4")->redundant);
}

TEST_CASE("Hoelder equality reads 1/r1 + 1/r2 = 1 - 1/r~ + alpha/n") {
  for (const auto& p : {pt(3, "2", "1"), pt(6, "4", "1/3"), pt(8, "15/2", "1/5")}) {
    const ConstraintSet raw = raw_constraints(p);
    const Constraint* c = raw.find("c7-eq");
    REQUIRE(c != nullptr);
    CHECK(c->kind == Relation::Equality);
    const LinearForm d = c->lhs - c->rhs;
    CHECK(d.coeff[index(Var::InvR1)] == Rational(1));
    CHECK(d.coeff[index(Var::InvR2)] == Rational(1));
    CHECK(d.coeff[index(Var::InvRt)] == Rational(1));
    CHECK(d.constant == -(Rational(1) + p.alpha / Rational(p.n)));
    for (auto v : {Var::InvQ, Var::InvR, Var::InvQt, Var::InvR3, Var::InvR4, Var::InvR5, Var::InvR6}) {
      CHECK(d.coeff[index(v)].is_zero());
    }
  }
}

TEST_CASE("out-of-range points are rejected") {
  CHECK_THROWS_AS(raw_constraints(pt(5, "1", "1/10")), std::invalid_argument);
  CHECK_THROWS_AS(reduced_constraints(pt(4, "4", "1")), std::invalid_argument);
  CHECK_THROWS_AS(verify_redundancy_claims(pt(3, "2", "2")), std::invalid_argument);
}

TEST_CASE("reduced window for (3, 2, 1)") {
  const FeasibilityVerdict v = reduced_feasibility(pt(3, "2", "1"));
  REQUIRE(v.feasible);
  const Interval nr = v.inv_r_window.scaled(Rational(3));
  REQUIRE(nr.lower);
  REQUIRE(nr.upper);
  CHECK(nr.lower->value == R("11/10"));
  CHECK(nr.lower->closed);
  CHECK(nr.upper->value == R("13/10"));
  CHECK(nr.upper->closed);
  // The raw system cuts out exactly the same window.
  const FeasibilityVerdict raw = raw_feasibility(pt(3, "2", "1"));
  REQUIRE(raw.feasible);
  CHECK(raw.inv_r_window.lower->value == v.inv_r_window.lower->value);
  CHECK(raw.inv_r_window.upper->value == v.inv_r_window.upper->value);
}

TEST_CASE("worked witness for (3, 2, 1)") {
  const auto w = find_witness(pt(3, "2", "1"));
  REQUIRE(w);
  const Rational n(3);
  CHECK(n * (*w)[Var::InvR] == R("6/5"));
  CHECK(*w->exponent(Var::InvR) == R("5/2"));
  CHECK(*w->exponent(Var::InvQ) == R("20/3"));
  CHECK(*w->exponent(Var::InvQt) == R("4"));
  CHECK(*w->exponent(Var::InvRt) == R("3"));
  CHECK(n * (*w)[Var::InvR1] == R("12/5"));
  CHECK(n * (*w)[Var::InvR2] == R("8/5"));
  CHECK(n * (*w)[Var::InvR3] == R("7/5"));
  CHECK(n * (*w)[Var::InvR4] == R("13/5"));
  CHECK(n * (*w)[Var::InvR5] == R("6/5"));
  CHECK(n * (*w)[Var::InvR6] == R("7/5"));
  const ConstraintSet raw = raw_constraints(pt(3, "2", "1"));
  CHECK_FALSE(raw.first_violation(w->values).has_value());
  for (const auto& check : raw.evaluate(w->values)) {
    INFO(check.label);
    CHECK(check.holds);
  }
}

TEST_CASE("infeasible and boundary points") {
  CHECK_FALSE(find_witness(pt(5, "3", "1/2")).has_value());
  const FeasibilityVerdict v = reduced_feasibility(pt(5, "3", "1/2"));
  CHECK_FALSE(v.feasible);
  CHECK(v.blocking_label == "r0-b-le-p-2");
  CHECK_FALSE(raw_feasibility(pt(5, "3", "1/2")).feasible);

  // b = p - 2 exactly.
  const ParamPoint edge = pt(4, "2", "1/2");
  CHECK(critical_power(edge).p - Rational(2) == edge.b);
  CHECK(reduced_feasibility(edge).feasible);
  CHECK(raw_feasibility(edge).feasible);
  const auto w = find_witness(edge);
  REQUIRE(w);
  CHECK_FALSE(raw_constraints(edge).first_violation(w->values).has_value());
}

TEST_CASE("p = 2 on the upper edge of the range is infeasible") {
  const ParamPoint top = pt(6, "5", "3/2");
  REQUIRE(in_range(top));
  CHECK(critical_power(top).p == Rational(2));
  CHECK_FALSE(raw_feasibility(top).feasible);
  CHECK_FALSE(reduced_feasibility(top).feasible);
  CHECK_FALSE(theorem_region(top));
}

TEST_CASE("back substitution is determined by inv_r alone") {
  std::mt19937_64 rng(3);
  for (int n = 3; n <= 8; ++n) {
    for (int i = 0; i < 50; ++i) {
      const ParamPoint p = sample_in_range(n, rng);
      const ConstraintSet raw = raw_constraints(p);
      const Substitution subst = eliminate_equalities(raw, Var::InvR);
      const Rational x = random_rational_between(Rational(0), Rational(1), rng);
      const ExponentAssignment w = back_substitute(p, x);
      for (std::size_t v = 0; v < kVarCount; ++v) {
        REQUIRE(subst[v].slope * x + subst[v].intercept == w.values[v]);
      }
      // Every equality row holds on the back-substituted point.
      for (const auto& c : raw.constraints) {
        if (c.kind == Relation::Equality) REQUIRE(c.holds(w.values));
      }
    }
  }
}

TEST_CASE("witnesses satisfy every raw constraint across dimensions") {
  for (int n = 3; n <= 8; ++n) {
    const auto samples = sample_in_range(n, 400, 1000 + n);
    ReductionOptions opts;
    opts.grid_stride = 40;
    const ReductionReport report = verify_reduction(samples, opts);
    INFO("n = " << n);
    CHECK(report.ok());
    CHECK(report.samples == samples.size());
    CHECK(report.grid_checked == 10);
    CHECK(report.raw_feasible == report.witnesses_checked);
  }
}

TEST_CASE("boundary of the theorem region is feasible, just above is not") {
  for (int n = 3; n <= 8; ++n) {
    const Rational lo = range_alpha_lower(n);
    for (int i = 1; i < 20; ++i) {
      const Rational alpha = lo + (Rational(n) - lo) * Rational(i, 20);
      const Rational edge = theorem_upper_bound(n, alpha);
      const ParamPoint on(n, alpha, edge);
      REQUIRE(in_range(on));
      CHECK(raw_feasibility(on).feasible);
      CHECK(reduced_feasibility(on).feasible);
      const ParamPoint above(n, alpha, edge + Rational(1, 1000000));
      if (in_range(above)) {
        CHECK_FALSE(raw_feasibility(above).feasible);
        CHECK_FALSE(reduced_feasibility(above).feasible);
      }
    }
  }
}

TEST_CASE("grid scan agrees with the exact window") {
  const ParamPoint p = pt(3, "2", "1");
  const GridScanResult scan = grid_scan(raw_constraints(p), 2520);
  REQUIRE(scan.first_feasible);
  // n/r >= 11/10 means inv_r >= 11/30 = 924/2520.
  CHECK(*scan.first_feasible == R("11/30"));
  CHECK_FALSE(grid_scan(raw_constraints(pt(5, "3", "1/2")), 2520).first_feasible.has_value());
  CHECK_THROWS_AS(grid_scan(raw_constraints(p), 0), std::invalid_argument);
}

TEST_CASE("interval bookkeeping") {
  Interval i;
  i.restrict_lower({R("1/3"), false});
  i.restrict_upper({R("1/2"), true});
  CHECK_FALSE(i.contains(R("1/3")));
  CHECK(i.contains(R("1/2")));
  CHECK(*i.representative() == R("5/12"));
  CHECK(*i.first_grid_point(6) == R("1/2"));
  CHECK(i.str() == "(1/3, 1/2]");
  Interval point;
  point.restrict_lower({R("1/4"), true});
  point.restrict_upper({R("1/4"), true});
  CHECK_FALSE(point.empty);
  CHECK(*point.representative() == R("1/4"));
  point.restrict_upper({R("1/4"), false});
  CHECK(point.empty);
  CHECK(point.str() == "{}");
}

TEST_CASE("difference estimate reuses the exponents of A3 and A4") {
  std::mt19937_64 rng(17);
  for (int n = 3; n <= 8; ++n) {
    for (int i = 0; i < 20; ++i) {
      const ParamPoint p = sample_in_range(n, rng);
      const ConstraintSet diff = difference_estimate_constraints(p);
      const ConstraintSet a3 = term_constraints(p, EstimateTerm::A3);
      const ConstraintSet a4 = term_constraints(p, EstimateTerm::A4);
      std::set<std::string> expected = a3.labels();
      for (const auto& l : a4.labels()) expected.insert(l);
      REQUIRE(diff.labels() == expected);
      for (const auto& c : diff.constraints) {
        const Constraint* a = a3.find(c.label);
        const Constraint* b = a4.find(c.label);
        REQUIRE((a != nullptr || b != nullptr));
        REQUIRE(c == (a != nullptr ? *a : *b));
      }
    }
  }
}

TEST_CASE("redundancy claims") {
  for (const auto& p : {pt(3, "2", "1"), pt(6, "3", "1/4")}) {
    const RedundancyReport r = verify_redundancy_claims(p);
    CHECK(r.all_hold());
    CHECK(r.violated().empty());
    CHECK(r.checks.size() == 14);
  }
  // The strict inequality (n-2)/2 < n/2 - 2/(2p-1) already holds at p = 2:
  // equality only occurs at p = 3/2.
  const Rational n(5);
  const Rational p(2);
  CHECK((n - Rational(2)) / Rational(2) < n / Rational(2) - Rational(2) / (Rational(2) * p - Rational(1)));
  CHECK((n - Rational(2)) / Rational(2) ==
        n / Rational(2) - Rational(2) / (Rational(2) * Rational(3, 2) - Rational(1)));
  std::mt19937_64 rng(8);
  for (int n2 = 3; n2 <= 8; ++n2) {
    for (int i = 0; i < 300; ++i) {
      const ParamPoint s = sample_in_range(n2, rng);
      const RedundancyReport r = verify_redundancy_claims(s);
      INFO(s.n << " " << s.alpha << " " << s.b);
      REQUIRE(r.all_hold());
    }
  }
}

TEST_CASE("JSON round trip and golden file") {
  const ConstraintSet raw = raw_constraints(pt(3, "2", "1"));
  const nlohmann::json doc = to_json(raw);
  const ConstraintSet back = constraint_set_from_json(doc);
  CHECK(back.p == raw.p);
  CHECK(back.params.n == 3);
  REQUIRE(back.constraints.size() == raw.constraints.size());
  for (std::size_t i = 0; i < raw.constraints.size(); ++i) CHECK(back.constraints[i] == raw.constraints[i]);

  const std::string path = std::string(HARTREE_GOLDEN_DIR) + "/raw_constraints_3_2_1.json";
  if (std::getenv("HARTREE_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(path) << doc.dump(2) << "\n";
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
  const nlohmann::json golden = nlohmann::json::parse(in);
  CHECK(golden == doc);

  const auto w = find_witness(pt(3, "2", "1"));
  const nlohmann::json wj = to_json(*w);
  CHECK(wj.at("inv_r") == "2/5");
}
