#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hartree/exponent_core.hpp"
#include "hartree/rational.hpp"

namespace hartree {

/// Reciprocal Lebesgue exponents. inv_q = 0 encodes q = infinity.
enum class Var : std::uint8_t { InvQ, InvR, InvQt, InvRt, InvR1, InvR2, InvR3, InvR4, InvR5, InvR6 };

inline constexpr std::size_t kVarCount = 10;

std::string_view to_string(Var var);
Var var_from_string(std::string_view name);
inline constexpr std::size_t index(Var var) { return static_cast<std::size_t>(var); }

using Assignment = std::array<Rational, kVarCount>;

/// sum_v coeff[v] * v + constant, exact.
struct LinearForm {
  std::array<Rational, kVarCount> coeff{};
  Rational constant;

  static LinearForm constant_form(Rational value);
  static LinearForm variable(Var var, Rational coefficient = Rational(1));

  [[nodiscard]] Rational evaluate(const Assignment& values) const;
  [[nodiscard]] bool is_constant() const;

  LinearForm& operator+=(const LinearForm& rhs);
  LinearForm& operator-=(const LinearForm& rhs);
  friend LinearForm operator+(LinearForm lhs, const LinearForm& rhs) { return lhs += rhs; }
  friend LinearForm operator-(LinearForm lhs, const LinearForm& rhs) { return lhs -= rhs; }
  friend LinearForm operator*(LinearForm form, const Rational& scale);
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

enum class Relation { Equality, StrictLess, LessEq };

std::string_view to_string(Relation relation);
Relation relation_from_string(std::string_view text);

/// lhs (=, <, <=) rhs, tagged with the displayed condition it transcribes.
struct Constraint {
  std::string label;
  std::string block;
  Relation kind = Relation::Equality;
  LinearForm lhs;
  LinearForm rhs;
  /// Implied by other constraints of the same set; kept for completeness.
  bool redundant = false;

  [[nodiscard]] bool holds(const Assignment& values) const;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct ConstraintCheck {
  std::string label;
  Relation kind;
  Rational lhs;
  Rational rhs;
  bool holds;
};

struct ConstraintSet {
  ParamPoint params;
  Rational p;
  std::vector<Constraint> constraints;

  [[nodiscard]] std::vector<ConstraintCheck> evaluate(const Assignment& values) const;
  /// Label of the first violated constraint, or nullopt when all hold.
  [[nodiscard]] std::optional<std::string> first_violation(const Assignment& values) const;
  [[nodiscard]] const Constraint* find(std::string_view label) const;
  [[nodiscard]] std::set<std::string> labels() const;
};

/// The estimate terms whose hypotheses make up the raw system, plus the
/// two terms of the difference estimate for N[u] - N[v].
enum class EstimateTerm { A1, A2, A3, A4, DifferenceFirst, DifferenceSecond };

/// Complete labeled system: admissibility of both pairs, the time-exponent
/// relation, and the Hoelder/CKN blocks of every estimate term.
ConstraintSet raw_constraints(const ParamPoint& pt);
/// Conditions required by one estimate term (no admissibility rows).
ConstraintSet term_constraints(const ParamPoint& pt, EstimateTerm term);
/// Union of the conditions needed by the two terms of the difference bound.
ConstraintSet difference_estimate_constraints(const ParamPoint& pt);
/// Reduced system in inv_r alone: b <= p - 2 together with the n/r window.
ConstraintSet reduced_constraints(const ParamPoint& pt);

struct Bound {
  Rational value;
  bool closed = true;
};

/// Interval of the real line with independently open/closed, possibly
/// missing (infinite) endpoints.
struct Interval {
  std::optional<Bound> lower;
  std::optional<Bound> upper;
  bool empty = false;

  void restrict_lower(const Bound& bound);
  void restrict_upper(const Bound& bound);
  [[nodiscard]] bool contains(const Rational& x) const;
  [[nodiscard]] Interval scaled(const Rational& factor) const;
  /// Midpoint when both ends are finite and distinct; the single point
  /// when the interval degenerates.
  [[nodiscard]] std::optional<Rational> representative() const;
  /// Smallest k/denominator in the interval, if any (finite lower bound required).
  [[nodiscard]] std::optional<Rational> first_grid_point(std::int64_t denominator) const;
  [[nodiscard]] std::string str() const;
};

/// x -> slope * x + intercept in the free variable.
struct AffineExpr {
  Rational slope;
  Rational intercept;
};

using Substitution = std::array<AffineExpr, kVarCount>;

/// Solves the equality rows of `set` for every variable except `free`,
/// by Gaussian elimination, giving each as an affine function of `free`.
/// Throws std::logic_error if the equalities leave another variable free.
Substitution eliminate_equalities(const ConstraintSet& set, Var free);

struct FeasibilityVerdict {
  bool feasible = false;
  /// Feasible values of inv_r.
  Interval inv_r_window;
  /// Constraint whose bound emptied the window (empty when feasible).
  std::string blocking_label;
};

/// Decides every constraint of `set` on the line parametrised by `subst`.
FeasibilityVerdict solve_on_line(const ConstraintSet& set, const Substitution& subst);

/// Exact raw-system feasibility: generic elimination plus interval intersection.
FeasibilityVerdict raw_feasibility(const ParamPoint& pt);
/// Exact reduced-system feasibility.
FeasibilityVerdict reduced_feasibility(const ParamPoint& pt);

/// Lebesgue exponents witnessing the raw system.
struct ExponentAssignment {
  Assignment values;

  [[nodiscard]] const Rational& operator[](Var var) const { return values[index(var)]; }
  /// The exponent itself; nullopt encodes infinity.
  [[nodiscard]] std::optional<Rational> exponent(Var var) const;
};

/// Back-substitution chain: q from admissibility, q~ from the time relation,
/// r~ from admissibility of the second pair, r1..r6 from the CKN equalities.
ExponentAssignment back_substitute(const ParamPoint& pt, const Rational& inv_r);

/// Witness with inv_r at the midpoint of the reduced window, or nullopt
/// when the point is outside the theorem region.
std::optional<ExponentAssignment> find_witness(const ParamPoint& pt);

struct GridScanResult {
  std::int64_t denominator = 0;
  std::optional<Rational> first_feasible;
};

/// Brute force: tries inv_r = k/D for k = 0..D, back-substitutes, and
/// evaluates every raw constraint.
GridScanResult grid_scan(const ConstraintSet& raw, std::int64_t denominator);

struct ReductionOptions {
  bool check_witness = true;
  /// Run the grid cross-check on every `grid_stride`-th sample; 0 disables.
  std::size_t grid_stride = 0;
  std::int64_t grid_denominator = 2520;
  std::size_t max_recorded_failures = 8;
};

struct ReductionFailure {
  ParamPoint pt;
  std::string kind;
  std::string detail;
};

struct ReductionReport {
  std::size_t samples = 0;
  std::size_t raw_feasible = 0;
  std::size_t witnesses_checked = 0;
  std::size_t grid_checked = 0;
  std::size_t equivalence_failures = 0;
  std::size_t witness_failures = 0;
  std::size_t grid_failures = 0;
  std::vector<ReductionFailure> failures;

  [[nodiscard]] bool ok() const {
    return equivalence_failures == 0 && witness_failures == 0 && grid_failures == 0;
  }
  void merge(const ReductionReport& other, std::size_t max_recorded = 8);
};

/// raw-feasible <=> reduced-feasible <=> theorem_region on every sample,
/// plus witness validity and the optional grid cross-check.
ReductionReport verify_reduction(const std::vector<ParamPoint>& samples,
                                 const ReductionOptions& options = {});

struct ImplicationCheck {
  std::string label;
  bool holds;
};

struct RedundancyReport {
  std::vector<ImplicationCheck> checks;

  [[nodiscard]] bool all_hold() const;
  [[nodiscard]] std::vector<std::string> violated() const;
};

/// Each elimination step of the reduction, checked exactly at `pt`.
RedundancyReport verify_redundancy_claims(const ParamPoint& pt);

}  // namespace hartree
