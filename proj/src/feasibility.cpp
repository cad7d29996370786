#include "hartree/feasibility.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

constexpr std::array<std::string_view, kVarCount> kVarNames = {
    "inv_q", "inv_r", "inv_qt", "inv_rt", "inv_r1", "inv_r2", "inv_r3", "inv_r4", "inv_r5", "inv_r6"};

LinearForm C(Rational value) { return LinearForm::constant_form(std::move(value)); }
LinearForm V(Var var, Rational coeff = Rational(1)) { return LinearForm::variable(var, std::move(coeff)); }

Constraint make(std::string label, std::string block, Relation kind, LinearForm lhs, LinearForm rhs,
                bool redundant = false) {
  return Constraint{std::move(label), std::move(block), kind, std::move(lhs), std::move(rhs), redundant};
}

void require_in_range(const ParamPoint& pt) {
  if (!in_range(pt)) {
    throw std::invalid_argument("parameter point (n=" + std::to_string(pt.n) + ", alpha=" + pt.alpha.str() +
                                ", b=" + pt.b.str() + ") is outside the admissible range");
  }
}

using Block = std::vector<Constraint>;

// Both Schroedinger admissibility pairs.
Block ad1_block(const ParamPoint& pt) {
  const Rational n(pt.n);
  const Rational half(1, 2);
  return {
      make("ad1-q-nonneg", "ad1", Relation::LessEq, C(0), V(Var::InvQ)),
      make("ad1-q-upper", "ad1", Relation::LessEq, V(Var::InvQ), C(half)),
      make("ad1-qr-eq", "ad1", Relation::Equality, V(Var::InvQ, 2) + V(Var::InvR, n), C(n * half)),
      make("ad1-qt-nonneg", "ad1", Relation::LessEq, C(0), V(Var::InvQt)),
      make("ad1-qt-upper", "ad1", Relation::LessEq, V(Var::InvQt), C(half)),
      make("ad1-qtrt-eq", "ad1", Relation::Equality, V(Var::InvQt, 2) + V(Var::InvRt, n), C(n * half)),
  };
}

// 1/q~' = (2p - 1)/q with 1/q~' = 1 - 1/q~.
Block q_block(const Rational& p) {
  return {make("q-relation", "q", Relation::Equality, C(1) - V(Var::InvQt),
               V(Var::InvQ, Rational(2) * p - Rational(1)))};
}

// Hoelder/HLS block: 0 < 1/ra, 1/rb < 1 and 1/ra + 1/rb = 1/r~' + alpha/n.
Block hls_block(const ParamPoint& pt, const std::string& name, Var ra, Var rb) {
  const Rational alpha_over_n = pt.alpha / Rational(pt.n);
  const auto a = std::string(to_string(ra)).substr(4);
  const auto b = std::string(to_string(rb)).substr(4);
  return {
      make(name + "-" + a + "-pos", name, Relation::StrictLess, C(0), V(ra)),
      make(name + "-" + a + "-lt1", name, Relation::StrictLess, V(ra), C(1)),
      make(name + "-" + b + "-pos", name, Relation::StrictLess, C(0), V(rb)),
      make(name + "-" + b + "-lt1", name, Relation::StrictLess, V(rb), C(1)),
      make(name + "-eq", name, Relation::Equality, V(ra) + V(rb), C(1) - V(Var::InvRt) + C(alpha_over_n)),
  };
}

// Weighted Sobolev block for || |x|^{-w/k} u ||_{L^{k ri}} <~ ||grad u||_{L^r}:
//   0 < 1/(k ri) <= 1/r < 1,  0 <= w/k < n/(k ri),  e/k = n/(k ri) - n/r.
// `ri_scale` multiplies the inv_ri terms and `r_scale` the inv_r terms, so the
// displayed form uses (1/k, 1) and the denominator-cleared form uses (1, k).
Block ckn_block(const ParamPoint& pt, const std::string& name, Var ri, const Rational& weight,
                const Rational& eq_constant, const Rational& ri_scale, const Rational& r_scale) {
  const Rational n(pt.n);
  return {
      make(name + "-pos", name, Relation::StrictLess, C(0), V(ri, ri_scale)),
      make(name + "-upper", name, Relation::LessEq, V(ri, ri_scale), V(Var::InvR, r_scale)),
      make(name + "-r-lt1", name, Relation::StrictLess, V(Var::InvR), C(1)),
      make(name + "-weight-nonneg", name, Relation::LessEq, C(0), C(weight * ri_scale)),
      make(name + "-weight-lower", name, Relation::StrictLess, C(weight * ri_scale), V(ri, n * ri_scale)),
      make(name + "-eq", name, Relation::Equality, C(eq_constant * ri_scale),
           V(ri, n * ri_scale) - V(Var::InvR, n * r_scale)),
  };
}

Block displayed_ckn(const ParamPoint& pt, const std::string& name, Var ri, const Rational& k,
                    const Rational& weight, const Rational& eq_constant) {
  return ckn_block(pt, name, ri, weight, eq_constant, k.reciprocal(), Rational(1));
}

Block split_block(const std::string& name, Var whole, Var part) {
  return {make(name, name, Relation::Equality, V(whole), V(part) + V(Var::InvR), /*redundant=*/true)};
}

Block block_by_name(const ParamPoint& pt, const Rational& p, std::string_view name) {
  const Rational& b = pt.b;
  const Rational one(1);
  const Rational two(2);
  if (name == "ad1") return ad1_block(pt);
  if (name == "q") return q_block(p);
  if (name == "c7") return hls_block(pt, "c7", Var::InvR1, Var::InvR2);
  if (name == "c8") return displayed_ckn(pt, "c8", Var::InvR1, p - one, b + one, b - p + two);
  if (name == "c9") return displayed_ckn(pt, "c9", Var::InvR2, p, b, b - p);
  if (name == "c10") return hls_block(pt, "c10", Var::InvR3, Var::InvR4);
  if (name == "c11") return displayed_ckn(pt, "c11", Var::InvR3, p - one, b, b - p + one);
  if (name == "c12") return displayed_ckn(pt, "c12", Var::InvR4, p, b + one, b - p + one);
  // p - 2 vanishes on the upper edge of the range, so this block is stored
  // multiplied through by p - 2 >= 0.
  if (name == "c2") return ckn_block(pt, "c2", Var::InvR5, b, b - p + two, one, p - two);
  if (name == "c6") return displayed_ckn(pt, "c6", Var::InvR6, p - one, b, b - p + one);
  if (name == "split-r1") return split_block("split-r1", Var::InvR1, Var::InvR5);
  if (name == "split-r4") return split_block("split-r4", Var::InvR4, Var::InvR6);
  throw std::logic_error("unknown constraint block " + std::string(name));
}

std::vector<std::string_view> blocks_of(EstimateTerm term) {
  switch (term) {
    case EstimateTerm::A1: return {"c7", "c8", "c9"};
    case EstimateTerm::A2: return {"c10", "c11", "c12"};
    case EstimateTerm::A3: return {"c7", "split-r1", "c9", "c2"};
    case EstimateTerm::A4: return {"c10", "split-r4", "c11", "c6"};
    // |u|^{p-2} grad u replaced by (|u|^{p-2} + |v|^{p-2})|u - v|: same exponents as A3.
    case EstimateTerm::DifferenceFirst: return {"c7", "split-r1", "c9", "c2"};
    // |u|^{p-1} grad u replaced by (|u|^{p-1} + |v|^{p-1})|u - v|: same exponents as A4.
    case EstimateTerm::DifferenceSecond: return {"c10", "split-r4", "c11", "c6"};
  }
  return {};
}

ConstraintSet assemble(const ParamPoint& pt, const std::vector<std::string_view>& blocks) {
  const Rational p = critical_power(pt).p;
  ConstraintSet set{pt, p, {}};
  std::set<std::string_view> seen;
  for (auto name : blocks) {
    if (!seen.insert(name).second) continue;
    for (auto& c : block_by_name(pt, p, name)) set.constraints.push_back(std::move(c));
  }
  return set;
}

AffineExpr affine_of(const LinearForm& form, const Substitution& subst) {
  AffineExpr out{Rational(0), form.constant};
  for (std::size_t v = 0; v < kVarCount; ++v) {
    if (form.coeff[v].is_zero()) continue;
    out.slope += form.coeff[v] * subst[v].slope;
    out.intercept += form.coeff[v] * subst[v].intercept;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Var var) { return kVarNames[index(var)]; }

Var var_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kVarCount; ++i) {
    if (kVarNames[i] == name) return static_cast<Var>(i);
  }
  throw std::invalid_argument("unknown variable " + std::string(name));
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::Equality: return "Equality";
    case Relation::StrictLess: return "StrictLess";
    case Relation::LessEq: return "LessEq";
  }
  return "?";
}

Relation relation_from_string(std::string_view text) {
  if (text == "Equality") return Relation::Equality;
  if (text == "StrictLess") return Relation::StrictLess;
  if (text == "LessEq") return Relation::LessEq;
  throw std::invalid_argument("unknown relation " + std::string(text));
}

LinearForm LinearForm::constant_form(Rational value) {
  LinearForm f;
  f.constant = std::move(value);
  return f;
}

LinearForm LinearForm::variable(Var var, Rational coefficient) {
  LinearForm f;
  f.coeff[index(var)] = std::move(coefficient);
  return f;
}

Rational LinearForm::evaluate(const Assignment& values) const {
  Rational total = constant;
  for (std::size_t v = 0; v < kVarCount; ++v) {
    if (!coeff[v].is_zero()) total += coeff[v] * values[v];
  }
  return total;
}

bool LinearForm::is_constant() const {
  return std::all_of(coeff.begin(), coeff.end(), [](const Rational& c) { return c.is_zero(); });
}

LinearForm& LinearForm::operator+=(const LinearForm& rhs) {
  for (std::size_t v = 0; v < kVarCount; ++v) coeff[v] += rhs.coeff[v];
  constant += rhs.constant;
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& rhs) {
  for (std::size_t v = 0; v < kVarCount; ++v) coeff[v] -= rhs.coeff[v];
  constant -= rhs.constant;
  return *this;
}

LinearForm operator*(LinearForm form, const Rational& scale) {
  for (auto& c : form.coeff) c *= scale;
  form.constant *= scale;
  return form;
}

bool Constraint::holds(const Assignment& values) const {
  const Rational l = lhs.evaluate(values);
  const Rational r = rhs.evaluate(values);
  switch (kind) {
    case Relation::Equality: return l == r;
    case Relation::StrictLess: return l < r;
    case Relation::LessEq: return l <= r;
  }
  return false;
}

std::vector<ConstraintCheck> ConstraintSet::evaluate(const Assignment& values) const {
  std::vector<ConstraintCheck> out;
  out.reserve(constraints.size());
  for (const auto& c : constraints) {
    out.push_back({c.label, c.kind, c.lhs.evaluate(values), c.rhs.evaluate(values), c.holds(values)});
  }
  return out;
}

std::optional<std::string> ConstraintSet::first_violation(const Assignment& values) const {
  for (const auto& c : constraints) {
    if (!c.holds(values)) return c.label;
  }
  return std::nullopt;
}

const Constraint* ConstraintSet::find(std::string_view label) const {
  for (const auto& c : constraints) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

std::set<std::string> ConstraintSet::labels() const {
  std::set<std::string> out;
  for (const auto& c : constraints) out.insert(c.label);
  return out;
}

ConstraintSet raw_constraints(const ParamPoint& pt) {
  require_in_range(pt);
  std::vector<std::string_view> blocks = {"ad1", "q"};
  for (auto term : {EstimateTerm::A1, EstimateTerm::A2, EstimateTerm::A3, EstimateTerm::A4}) {
    for (auto name : blocks_of(term)) blocks.push_back(name);
  }
  return assemble(pt, blocks);
}

ConstraintSet term_constraints(const ParamPoint& pt, EstimateTerm term) {
  require_in_range(pt);
  return assemble(pt, blocks_of(term));
}

ConstraintSet difference_estimate_constraints(const ParamPoint& pt) {
  require_in_range(pt);
  auto blocks = blocks_of(EstimateTerm::DifferenceFirst);
  for (auto name : blocks_of(EstimateTerm::DifferenceSecond)) blocks.push_back(name);
  return assemble(pt, blocks);
}

ConstraintSet reduced_constraints(const ParamPoint& pt) {
  require_in_range(pt);
  const Rational p = critical_power(pt).p;
  const Rational n(pt.n);
  const Rational one(1);
  const Rational two_p_minus_1 = Rational(2) * p - one;
  ConstraintSet set{pt, p, {}};
  auto nr = V(Var::InvR, n);
  set.constraints = {
      make("r0-b-le-p-2", "r0", Relation::LessEq, C(pt.b), C(p - Rational(2))),
      make("r0-nr-gt-1", "r0", Relation::StrictLess, C(one), nr),
      make("r0-nr-upper", "r0", Relation::StrictLess, nr, C(one + (n - one - pt.b) / p)),
      make("r0-adm-lower", "r0", Relation::LessEq, C(n / Rational(2) - Rational(2) / two_p_minus_1), nr),
      make("r0-adm-upper", "r0", Relation::LessEq, nr, C(n / Rational(2) - one / two_p_minus_1)),
  };
  return set;
}

// ---------------------------------------------------------------------------
// Interval

void Interval::restrict_lower(const Bound& bound) {
  if (empty) return;
  if (!lower || bound.value > lower->value || (bound.value == lower->value && !bound.closed)) lower = bound;
  if (lower && upper &&
      (lower->value > upper->value || (lower->value == upper->value && !(lower->closed && upper->closed)))) {
    empty = true;
  }
}

void Interval::restrict_upper(const Bound& bound) {
  if (empty) return;
  if (!upper || bound.value < upper->value || (bound.value == upper->value && !bound.closed)) upper = bound;
  if (lower && upper &&
      (lower->value > upper->value || (lower->value == upper->value && !(lower->closed && upper->closed)))) {
    empty = true;
  }
}

bool Interval::contains(const Rational& x) const {
  if (empty) return false;
  if (lower && (x < lower->value || (x == lower->value && !lower->closed))) return false;
  if (upper && (x > upper->value || (x == upper->value && !upper->closed))) return false;
  return true;
}

Interval Interval::scaled(const Rational& factor) const {
  if (factor.sign() <= 0) throw std::invalid_argument("Interval::scaled requires a positive factor");
  Interval out = *this;
  if (out.lower) out.lower->value *= factor;
  if (out.upper) out.upper->value *= factor;
  return out;
}

std::optional<Rational> Interval::representative() const {
  if (empty || !lower || !upper) return std::nullopt;
  if (lower->value == upper->value) return lower->value;
  return (lower->value + upper->value) / Rational(2);
}

std::optional<Rational> Interval::first_grid_point(std::int64_t denominator) const {
  if (empty || !lower) return std::nullopt;
  const Rational d(denominator);
  Rational k = (lower->value * d).ceil();
  if (!lower->closed && k / d == lower->value) k += Rational(1);
  const Rational x = k / d;
  if (contains(x)) return x;
  return std::nullopt;
}

std::string Interval::str() const {
  if (empty) return "{}";
  std::ostringstream os;
  if (lower) {
    os << (lower->closed ? "[" : "(") << lower->value.str();
  } else {
    os << "(-inf";
  }
  os << ", ";
  if (upper) {
    os << upper->value.str() << (upper->closed ? "]" : ")");
  } else {
    os << "+inf)";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Elimination and line solving

Substitution eliminate_equalities(const ConstraintSet& set, Var free) {
  // Rows: sum_{v != free} a_v v = rhs(x), with rhs affine in the free variable.
  struct Row {
    std::array<Rational, kVarCount> a;
    AffineExpr rhs;
  };
  std::vector<Row> rows;
  const std::size_t f = index(free);
  for (const auto& c : set.constraints) {
    if (c.kind != Relation::Equality) continue;
    const LinearForm d = c.lhs - c.rhs;
    Row row{d.coeff, {-d.coeff[f], -d.constant}};
    row.a[f] = Rational(0);
    rows.push_back(std::move(row));
  }

  std::array<std::optional<std::size_t>, kVarCount> pivot_row{};
  std::size_t next = 0;
  for (std::size_t col = 0; col < kVarCount; ++col) {
    if (col == f) continue;
    std::size_t pivot = next;
    while (pivot < rows.size() && rows[pivot].a[col].is_zero()) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[next]);
    Row& pr = rows[next];
    const Rational inv = pr.a[col].reciprocal();
    for (auto& x : pr.a) x *= inv;
    pr.rhs.slope *= inv;
    pr.rhs.intercept *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == next || rows[r].a[col].is_zero()) continue;
      const Rational factor = rows[r].a[col];
      for (std::size_t k = 0; k < kVarCount; ++k) rows[r].a[k] -= factor * pr.a[k];
      rows[r].rhs.slope -= factor * pr.rhs.slope;
      rows[r].rhs.intercept -= factor * pr.rhs.intercept;
    }
    pivot_row[col] = next;
    ++next;
  }

  Substitution subst;
  for (std::size_t v = 0; v < kVarCount; ++v) {
    if (v == f) {
      subst[v] = {Rational(1), Rational(0)};
      continue;
    }
    if (!pivot_row[v]) {
      throw std::logic_error("equalities do not determine " + std::string(kVarNames[v]));
    }
    subst[v] = rows[*pivot_row[v]].rhs;
  }
  return subst;
}

FeasibilityVerdict solve_on_line(const ConstraintSet& set, const Substitution& subst) {
  FeasibilityVerdict verdict;
  Interval& window = verdict.inv_r_window;
  for (const auto& c : set.constraints) {
    // lhs - rhs = slope * x + intercept, compared against 0.
    const AffineExpr e = affine_of(c.lhs - c.rhs, subst);
    const bool was_empty = window.empty;
    if (e.slope.is_zero()) {
      const int s = e.intercept.sign();
      const bool ok = c.kind == Relation::Equality ? s == 0 : (c.kind == Relation::StrictLess ? s < 0 : s <= 0);
      if (!ok) window.empty = true;
    } else {
      const Rational root = -e.intercept / e.slope;
      if (c.kind == Relation::Equality) {
        window.restrict_lower({root, true});
        window.restrict_upper({root, true});
      } else {
        const bool closed = c.kind == Relation::LessEq;
        if (e.slope.sign() > 0) {
          window.restrict_upper({root, closed});
        } else {
          window.restrict_lower({root, closed});
        }
      }
    }
    if (!was_empty && window.empty) verdict.blocking_label = c.label;
  }
  verdict.feasible = !window.empty;
  return verdict;
}

FeasibilityVerdict raw_feasibility(const ParamPoint& pt) {
  const ConstraintSet raw = raw_constraints(pt);
  return solve_on_line(raw, eliminate_equalities(raw, Var::InvR));
}

FeasibilityVerdict reduced_feasibility(const ParamPoint& pt) {
  const ConstraintSet reduced = reduced_constraints(pt);
  Substitution identity;
  for (std::size_t v = 0; v < kVarCount; ++v) identity[v] = {Rational(0), Rational(0)};
  identity[index(Var::InvR)] = {Rational(1), Rational(0)};
  return solve_on_line(reduced, identity);
}

// ---------------------------------------------------------------------------
// Witness

std::optional<Rational> ExponentAssignment::exponent(Var var) const {
  const Rational& inv = (*this)[var];
  if (inv.is_zero()) return std::nullopt;
  return inv.reciprocal();
}

ExponentAssignment back_substitute(const ParamPoint& pt, const Rational& inv_r) {
  const Rational p = critical_power(pt).p;
  const Rational n(pt.n);
  const Rational one(1);
  const Rational two(2);
  const Rational& b = pt.b;
  const Rational nr = n * inv_r;

  ExponentAssignment w;
  auto set = [&w](Var v, Rational value) { w.values[index(v)] = std::move(value); };
  set(Var::InvR, inv_r);
  const Rational inv_q = (n / two - nr) / two;
  set(Var::InvQ, inv_q);
  const Rational inv_qt = one - (two * p - one) * inv_q;
  set(Var::InvQt, inv_qt);
  set(Var::InvRt, (n / two - two * inv_qt) / n);
  set(Var::InvR1, (b - p + two + (p - one) * nr) / n);
  set(Var::InvR2, (b - p + p * nr) / n);
  set(Var::InvR3, (b - p + one + (p - one) * nr) / n);
  set(Var::InvR4, (b - p + one + p * nr) / n);
  set(Var::InvR5, (b - p + two + (p - two) * nr) / n);
  set(Var::InvR6, (b - p + one + (p - one) * nr) / n);
  return w;
}

std::optional<ExponentAssignment> find_witness(const ParamPoint& pt) {
  if (!theorem_region(pt)) return std::nullopt;
  const FeasibilityVerdict reduced = reduced_feasibility(pt);
  if (!reduced.feasible) return std::nullopt;
  const auto inv_r = reduced.inv_r_window.representative();
  if (!inv_r) return std::nullopt;
  return back_substitute(pt, *inv_r);
}

GridScanResult grid_scan(const ConstraintSet& raw, std::int64_t denominator) {
  if (denominator <= 0) throw std::invalid_argument("grid_scan: denominator must be positive");
  GridScanResult result{denominator, std::nullopt};
  for (std::int64_t k = 0; k <= denominator; ++k) {
    const Rational inv_r(k, denominator);
    const ExponentAssignment w = back_substitute(raw.params, inv_r);
    if (!raw.first_violation(w.values)) {
      result.first_feasible = inv_r;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Verification drivers

void ReductionReport::merge(const ReductionReport& other, std::size_t max_recorded) {
  samples += other.samples;
  raw_feasible += other.raw_feasible;
  witnesses_checked += other.witnesses_checked;
  grid_checked += other.grid_checked;
  equivalence_failures += other.equivalence_failures;
  witness_failures += other.witness_failures;
  grid_failures += other.grid_failures;
  for (const auto& f : other.failures) {
    if (failures.size() >= max_recorded) break;
    failures.push_back(f);
  }
}

namespace {

std::string yes_no(bool v) { return v ? "feasible" : "infeasible"; }

bool admissibility_bands_hold(const ParamPoint& pt, const ExponentAssignment& w) {
  const Rational half(1, 2);
  const Rational n(pt.n);
  const auto& iq = w[Var::InvQ];
  const auto& iqt = w[Var::InvQt];
  return Rational(0) <= iq && iq <= half && Rational(0) <= iqt && iqt <= half &&
         Rational(2) * iq + n * w[Var::InvR] == n * half && Rational(2) * iqt + n * w[Var::InvRt] == n * half;
}

}  // namespace

ReductionReport verify_reduction(const std::vector<ParamPoint>& samples, const ReductionOptions& options) {
  ReductionReport report;
  auto record = [&](const ParamPoint& pt, std::string kind, std::string detail) {
    if (report.failures.size() < options.max_recorded_failures) {
      report.failures.push_back({pt, std::move(kind), std::move(detail)});
    }
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const ParamPoint& pt = samples[i];
    ++report.samples;
    const ConstraintSet raw = raw_constraints(pt);
    const FeasibilityVerdict raw_verdict = solve_on_line(raw, eliminate_equalities(raw, Var::InvR));
    const FeasibilityVerdict reduced_verdict = reduced_feasibility(pt);
    const bool theorem = theorem_region(pt);
    if (raw_verdict.feasible) ++report.raw_feasible;

    if (raw_verdict.feasible != reduced_verdict.feasible || reduced_verdict.feasible != theorem) {
      ++report.equivalence_failures;
      record(pt, "equivalence",
             "raw " + yes_no(raw_verdict.feasible) + " (blocked by '" + raw_verdict.blocking_label + "'), reduced " +
                 yes_no(reduced_verdict.feasible) + " (blocked by '" + reduced_verdict.blocking_label +
                 "'), theorem_region " + (theorem ? "true" : "false"));
    }

    if (options.check_witness && theorem) {
      ++report.witnesses_checked;
      const auto w = find_witness(pt);
      if (!w) {
        ++report.witness_failures;
        record(pt, "witness", "no witness produced inside the theorem region");
      } else if (auto violated = raw.first_violation(w->values)) {
        ++report.witness_failures;
        record(pt, "witness", "witness violates '" + *violated + "'");
      } else if (!admissibility_bands_hold(pt, *w)) {
        ++report.witness_failures;
        record(pt, "witness", "witness leaves the admissibility bands");
      }
    }

    if (options.grid_stride != 0 && i % options.grid_stride == 0) {
      ++report.grid_checked;
      const GridScanResult scan = grid_scan(raw, options.grid_denominator);
      const auto expected = raw_verdict.inv_r_window.first_grid_point(options.grid_denominator);
      const bool agree = (scan.first_feasible.has_value() == expected.has_value()) &&
                         (!expected || *scan.first_feasible == *expected);
      if (!agree) {
        ++report.grid_failures;
        record(pt, "grid", "grid scan " + (scan.first_feasible ? scan.first_feasible->str() : std::string("none")) +
                               " vs interval " + raw_verdict.inv_r_window.str());
      }
    }
  }
  return report;
}

bool RedundancyReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const ImplicationCheck& c) { return c.holds; });
}

std::vector<std::string> RedundancyReport::violated() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.holds) out.push_back(c.label);
  }
  return out;
}

RedundancyReport verify_redundancy_claims(const ParamPoint& pt) {
  require_in_range(pt);
  const Rational p = critical_power(pt).p;
  const Rational n(pt.n);
  const Rational& b = pt.b;
  const Rational& alpha = pt.alpha;
  const Rational one(1);
  const Rational two(2);
  const Rational two_p_minus_1 = two * p - one;
  auto implies = [](bool premise, bool conclusion) { return !premise || conclusion; };

  RedundancyReport report;
  auto add = [&report](std::string label, bool holds) { report.checks.push_back({std::move(label), holds}); };

  // Upper bounds on n/r in the four eliminated blocks.
  const Rational upper_a = one + (n - one - b) / (p - one);
  const Rational upper_b = one + (n - b) / p;
  const Rational upper_c16 = one + (n - b) / (p - one);
  const Rational upper_c = one + (n - one - b) / p;

  add("b-last-implied-by-a", implies(b <= p - two, b <= p));
  add("c16-last-implied-by-c", implies(b <= p - two, b <= p - one));
  add("c16-upper-exceeds-a", upper_c16 > upper_a);
  add("b-upper-exceeds-c", upper_b > upper_c);
  add("a-upper-exceeds-c-given-b-lt-n-1", implies(b < n - one, upper_a > upper_c));

  // b < (4 + alpha - n)/2 < 2 when p > 2, hence b < n - 1.
  const Rational se_mid = (Rational(4) + alpha - n) / two;
  add("se-b-below-mid", implies(p > two, b < se_mid));
  add("se-mid-below-2", se_mid < two);
  add("se-b-lt-n-1", b < n - one);

  // Second admissibility window lies inside the first: (n-2)/2 < n/2 - 2/(2p-1).
  const Rational adm_lower = n / two - two / two_p_minus_1;
  const Rational adm_upper = n / two - one / two_p_minus_1;
  add("r-first-implied-by-second", implies(p > two, (n - two) / two < adm_lower && adm_upper <= n / two));

  // Existence conditions of the n/r window.
  add("exists-b-lt-n-1", b < n - one);
  add("exists-p-gt-half-plus", p > one / two + one / (n - two));
  const Rational third_bound = n - (n - two) * p / two + two * p / two_p_minus_1 - one;
  add("exists-third", b < third_bound);
  // The third condition rewritten with p eliminated: (n - alpha)/2 > (n-2)/(4b - 2alpha - 2 - n),
  // whose right-hand side is negative because 2b - alpha <= 4 - n.
  const Rational denom = Rational(4) * b - two * alpha - two - n;
  add("exists-third-rhs-negative", denom.sign() < 0);
  add("exists-third-rewritten", denom.sign() != 0 && (n - alpha) / two > (n - two) / denom);
  return report;
}

}  // namespace hartree
