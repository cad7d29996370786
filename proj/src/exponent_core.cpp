#include "hartree/exponent_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hartree {

ParamPoint::ParamPoint(int n_, Rational alpha_, Rational b_)
    : n(n_), alpha(std::move(alpha_)), b(std::move(b_)) {
  if (n < 3) throw std::invalid_argument("ParamPoint requires n >= 3, got " + std::to_string(n));
}

CriticalPower critical_power(const ParamPoint& pt) {
  const Rational n(pt.n);
  return {Rational(2) + (pt.alpha - n + Rational(4) - Rational(2) * pt.b) / (n - Rational(2))};
}

ScalingExponents scaling_exponents(const ParamPoint& pt) {
  return scaling_exponents(pt, critical_power(pt).p);
}

ScalingExponents scaling_exponents(const ParamPoint& pt, const Rational& p) {
  if (p == Rational(1)) throw std::invalid_argument("scaling exponents undefined for p = 1");
  const Rational amplitude =
      (Rational(2) - Rational(2) * pt.b + pt.alpha) / (Rational(2) * (p - Rational(1)));
  const Rational h1dot = Rational(1) - Rational(pt.n, 2) + amplitude;
  return {amplitude, h1dot};
}

bool schrodinger_admissible(int dim, const Rational& inv_q, const Rational& inv_r) {
  if (dim < 1) return false;
  if (inv_q.sign() < 0 || inv_q > Rational(1, 2) || inv_r.sign() < 0 || inv_r > Rational(1, 2)) return false;
  if (dim == 2 && inv_q == Rational(1, 2) && inv_r.is_zero()) return false;
  return Rational(2) * inv_q + Rational(dim) * inv_r == Rational(dim, 2);
}

Rational range_alpha_lower(int n) { return max(Rational(0), Rational(n - 4)); }

Rational range_upper_bound(int n, const Rational& alpha) {
  return (alpha - Rational(n) + Rational(4)) / Rational(2);
}

Rational theorem_upper_bound(int n, const Rational& alpha) {
  return (alpha - Rational(n) + Rational(4)) / Rational(n);
}

bool in_range(const ParamPoint& pt) {
  return range_alpha_lower(pt.n) < pt.alpha && pt.alpha < Rational(pt.n) && Rational(0) < pt.b &&
         pt.b <= range_upper_bound(pt.n, pt.alpha);
}

bool theorem_region(const ParamPoint& pt) {
  return in_range(pt) && pt.b <= theorem_upper_bound(pt.n, pt.alpha);
}

Rational kim_alpha_lower(int n) { return max(Rational(n - 2, 3), Rational(n - 4)); }

std::int64_t kim_radicand(int n) {
  const std::int64_t nn = n;
  return 9 * nn * nn - 8 * nn + 16;
}

QuadraticSurd kim_lower_line(int n, const Rational& alpha) {
  // alpha/2 - (n-4)/8 - sqrt(d)/8
  return QuadraticSurd(alpha / Rational(2) - Rational(n - 4, 8), Rational(-1, 8), kim_radicand(n));
}

bool kim_region(const ParamPoint& pt) {
  if (!(kim_alpha_lower(pt.n) < pt.alpha && pt.alpha < Rational(pt.n))) return false;
  if (!(Rational(0) < pt.b && pt.b <= range_upper_bound(pt.n, pt.alpha))) return false;
  // b > alpha/2 - (n - 4 + sqrt(d))/8, strict.
  return kim_lower_line(pt.n, pt.alpha).compare(pt.b) < 0;
}

bool gx_region(const ParamPoint& pt) {
  if (pt.n != 3) return false;
  if (!(Rational(0) < pt.alpha && pt.alpha < Rational(3))) return false;
  const Rational upper = min((pt.alpha + Rational(1)) / Rational(3), pt.alpha / Rational(2));
  return Rational(0) < pt.b && pt.b <= upper;
}

bool sp_region(const ParamPoint& pt) {
  if (pt.n != 3) return false;
  if (!(Rational(0) < pt.alpha && pt.alpha < Rational(1))) return false;
  return pt.alpha / Rational(2) < pt.b && pt.b < (pt.alpha + Rational(1)) / Rational(2);
}

std::string_view to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::ThisPaper: return "ThisPaper";
    case RegionLabel::Kim: return "Kim";
    case RegionLabel::GuzmanXu3d: return "GuzmanXu3d";
    case RegionLabel::SaanouniPeng3d: return "SaanouniPeng3d";
    case RegionLabel::Open: return "Open";
    case RegionLabel::OutOfRange: return "OutOfRange";
  }
  return "?";
}

RegionLabel region_label_from_string(std::string_view text) {
  for (auto label : {RegionLabel::ThisPaper, RegionLabel::Kim, RegionLabel::GuzmanXu3d,
                     RegionLabel::SaanouniPeng3d, RegionLabel::Open, RegionLabel::OutOfRange}) {
    if (to_string(label) == text) return label;
  }
  throw std::invalid_argument("unknown region label: " + std::string(text));
}

RegionLabel classify(const ParamPoint& pt) {
  if (!in_range(pt)) return RegionLabel::OutOfRange;
  if (theorem_region(pt)) return RegionLabel::ThisPaper;
  if (kim_region(pt)) return RegionLabel::Kim;
  if (gx_region(pt)) return RegionLabel::GuzmanXu3d;
  if (sp_region(pt)) return RegionLabel::SaanouniPeng3d;
  return RegionLabel::Open;
}

// ---------------------------------------------------------------------------
// QuadraticSurd

namespace {

std::int64_t isqrt(std::int64_t value) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(value)));
  while (r * r > value) --r;
  while ((r + 1) * (r + 1) <= value) ++r;
  return r;
}

}  // namespace

bool QuadraticSurd::is_perfect_square(std::int64_t value) {
  if (value < 0) return false;
  const auto r = isqrt(value);
  return r * r == value;
}

QuadraticSurd::QuadraticSurd(Rational rational_part, Rational radical_coeff, std::int64_t radicand)
    : a_(std::move(rational_part)), c_(std::move(radical_coeff)), d_(radicand) {
  if (d_ <= 0) throw std::invalid_argument("QuadraticSurd radicand must be positive");
}

QuadraticSurd QuadraticSurd::rational(Rational value, std::int64_t radicand) {
  return QuadraticSurd(std::move(value), Rational(0), radicand);
}

int QuadraticSurd::sign() const {
  if (c_.is_zero()) return a_.sign();
  if (is_perfect_square(d_)) return (a_ + c_ * Rational(isqrt(d_))).sign();
  const int sa = a_.sign();
  const int sc = c_.sign();
  if (sa == 0) return sc;
  if (sa == sc) return sa;
  const Rational a2 = a_ * a_;
  const Rational c2d = c_ * c_ * Rational(d_);
  // a and c*sqrt(d) have opposite signs; the larger magnitude wins.
  if (a2 == c2d) return 0;
  return (a2 > c2d) ? sa : sc;
}

int QuadraticSurd::compare(const Rational& value) const { return (*this - value).sign(); }

int QuadraticSurd::compare(const QuadraticSurd& other) const { return (*this - other).sign(); }

double QuadraticSurd::to_double() const {
  return a_.to_double() + c_.to_double() * std::sqrt(static_cast<double>(d_));
}

std::string QuadraticSurd::str() const {
  if (c_.is_zero()) return a_.str();
  std::ostringstream os;
  os << a_.str() << (c_.sign() < 0 ? " - " : " + ") << c_.abs().str() << "*sqrt(" << d_ << ")";
  return os.str();
}

void QuadraticSurd::require_same_radicand(const QuadraticSurd& other) const {
  if (d_ != other.d_ && !c_.is_zero() && !other.c_.is_zero()) {
    throw std::invalid_argument("QuadraticSurd arithmetic across different radicands");
  }
}

QuadraticSurd QuadraticSurd::operator+(const QuadraticSurd& rhs) const {
  require_same_radicand(rhs);
  const std::int64_t d = c_.is_zero() ? rhs.d_ : d_;
  return QuadraticSurd(a_ + rhs.a_, c_ + rhs.c_, d);
}

QuadraticSurd QuadraticSurd::operator-(const QuadraticSurd& rhs) const {
  require_same_radicand(rhs);
  const std::int64_t d = c_.is_zero() ? rhs.d_ : d_;
  return QuadraticSurd(a_ - rhs.a_, c_ - rhs.c_, d);
}

QuadraticSurd QuadraticSurd::operator*(const Rational& scale) const {
  return QuadraticSurd(a_ * scale, c_ * scale, d_);
}

QuadraticSurd QuadraticSurd::operator+(const Rational& shift) const {
  return QuadraticSurd(a_ + shift, c_, d_);
}

QuadraticSurd QuadraticSurd::operator-(const Rational& shift) const {
  return QuadraticSurd(a_ - shift, c_, d_);
}

// ---------------------------------------------------------------------------
// Landmarks

std::vector<LandmarkPoint> landmarks(int n) {
  if (n < 3) throw std::invalid_argument("landmarks require n >= 3");
  const std::int64_t d = kim_radicand(n);
  auto rat = [d](Rational v) { return QuadraticSurd::rational(std::move(v), d); };

  std::vector<LandmarkPoint> out;
  // B = ((n - 4 + sqrt(d))/4, 0)
  out.push_back({'B', QuadraticSurd(Rational(n - 4, 4), Rational(1, 4), d), rat(Rational(0))});
  // D = (n, (3n + 4 - sqrt(d))/8)
  out.push_back({'D', rat(Rational(n)), QuadraticSurd(Rational(3 * n + 4, 8), Rational(-1, 8), d)});
  // F = (max{(n-2)/3, n-4}, max{0, (5-n)/3})
  out.push_back({'F', rat(kim_alpha_lower(n)), rat(max(Rational(0), Rational(5 - n, 3)))});
  if (n == 3) out.push_back({'G', rat(Rational(0)), rat(Rational(1, 2))});
  if (n >= 4) out.push_back({'I', rat(Rational(2, 3)), rat(Rational(1, 6))});
  // J = (n, 4/n)
  out.push_back({'J', rat(Rational(n)), rat(Rational(4, n))});
  if (n == 3) {
    out.push_back({'L', rat(Rational(1, 3)), rat(Rational(1, 6))});
    out.push_back({'M', rat(Rational(2)), rat(Rational(1))});
    out.push_back({'N', rat(Rational(3)), rat(Rational(4, 3))});
  }
  return out;
}

}  // namespace hartree
