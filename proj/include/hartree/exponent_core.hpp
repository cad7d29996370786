#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hartree/rational.hpp"

namespace hartree {

/// A point (n, alpha, b) of the parameter plane. Range membership is a
/// separate query; construction only enforces n >= 3.
struct ParamPoint {
  ParamPoint(int n, Rational alpha, Rational b);

  int n;
  Rational alpha;
  Rational b;
};

struct CriticalPower {
  Rational p;
};

/// p = 2 + (alpha - n + 4 - 2b) / (n - 2).
CriticalPower critical_power(const ParamPoint& pt);

struct ScalingExponents {
  /// Exponent of delta multiplying u(delta x, delta^2 t).
  Rational amplitude;
  /// Exponent of delta in ||u_delta(0)||_{H^1-dot} / ||u_0||_{H^1-dot}.
  Rational h1dot;
};

/// Scaling exponents at the critical power of `pt`.
ScalingExponents scaling_exponents(const ParamPoint& pt);
/// Scaling exponents for an arbitrary power p (p != 1).
ScalingExponents scaling_exponents(const ParamPoint& pt, const Rational& p);

/// max{0, n-4} < alpha < n and 0 < b <= (alpha - n + 4)/2.
bool in_range(const ParamPoint& pt);
/// in_range and 0 < b <= (alpha - n + 4)/n.
bool theorem_region(const ParamPoint& pt);
/// Sobolev-Lorentz region; the irrational lower bound is compared exactly.
bool kim_region(const ParamPoint& pt);
/// Three-dimensional Hardy-inequality region; false for n != 3.
bool gx_region(const ParamPoint& pt);
/// Three-dimensional region with b strictly between alpha/2 and (alpha+1)/2;
/// false for n != 3.
bool sp_region(const ParamPoint& pt);

/// Upper boundary of the theorem region, (alpha - n + 4)/n.
Rational theorem_upper_bound(int n, const Rational& alpha);
/// Upper boundary of the admissible range, (alpha - n + 4)/2.
Rational range_upper_bound(int n, const Rational& alpha);
/// Lower boundary of alpha in the admissible range, max{0, n - 4}.
Rational range_alpha_lower(int n);

/// 2/q + dim/r = dim/2 with 2 <= q <= inf, given as reciprocals (0 means
/// infinity). The endpoint (2, inf) is excluded in dimension 2.
bool schrodinger_admissible(int dim, const Rational& inv_q, const Rational& inv_r);

enum class RegionLabel { ThisPaper, Kim, GuzmanXu3d, SaanouniPeng3d, Open, OutOfRange };

std::string_view to_string(RegionLabel label);
RegionLabel region_label_from_string(std::string_view text);

/// OutOfRange if the point is outside the admissible range, otherwise the
/// first of ThisPaper, Kim, GuzmanXu3d, SaanouniPeng3d that contains the
/// point, and Open if none does. The regions overlap; the order is a
/// reporting convention only.
RegionLabel classify(const ParamPoint& pt);

/// Exact value a + c * sqrt(d) with a, c rational and d a positive integer.
/// Only arithmetic between surds sharing the same radicand is supported.
class QuadraticSurd {
 public:
  QuadraticSurd(Rational rational_part, Rational radical_coeff, std::int64_t radicand);
  static QuadraticSurd rational(Rational value, std::int64_t radicand);

  [[nodiscard]] const Rational& rational_part() const { return a_; }
  [[nodiscard]] const Rational& radical_coeff() const { return c_; }
  [[nodiscard]] std::int64_t radicand() const { return d_; }

  /// Sign of the exact value, decided by isolating the radical and squaring.
  [[nodiscard]] int sign() const;
  /// Sign of (*this - value).
  [[nodiscard]] int compare(const Rational& value) const;
  [[nodiscard]] int compare(const QuadraticSurd& other) const;
  [[nodiscard]] bool is_rational() const { return c_.is_zero() || is_perfect_square(d_); }
  [[nodiscard]] double to_double() const;
  [[nodiscard]] std::string str() const;

  QuadraticSurd operator+(const QuadraticSurd& rhs) const;
  QuadraticSurd operator-(const QuadraticSurd& rhs) const;
  QuadraticSurd operator*(const Rational& scale) const;
  QuadraticSurd operator+(const Rational& shift) const;
  QuadraticSurd operator-(const Rational& shift) const;

  friend bool operator==(const QuadraticSurd& lhs, const QuadraticSurd& rhs) {
    return lhs.compare(rhs) == 0;
  }

  static bool is_perfect_square(std::int64_t value);

 private:
  void require_same_radicand(const QuadraticSurd& other) const;

  Rational a_;
  Rational c_;
  std::int64_t d_;
};

/// 9n^2 - 8n + 16.
std::int64_t kim_radicand(int n);

/// alpha/2 - (n - 4 + sqrt(9n^2 - 8n + 16))/8, the lower b-boundary line of
/// the Sobolev-Lorentz region.
QuadraticSurd kim_lower_line(int n, const Rational& alpha);

/// Lower alpha bound of the Sobolev-Lorentz region, max{(n-2)/3, n-4}.
Rational kim_alpha_lower(int n);

struct LandmarkPoint {
  char name;
  QuadraticSurd alpha;
  QuadraticSurd b;
};

/// Captioned landmarks of the region diagrams for dimension n: B, D, F, J
/// always; G, L, M, N when n = 3; I when n >= 4.
std::vector<LandmarkPoint> landmarks(int n);

}  // namespace hartree
