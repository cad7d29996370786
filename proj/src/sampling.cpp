#include "hartree/sampling.hpp"

#include <stdexcept>

namespace hartree {

Rational random_rational_between(const Rational& lo, const Rational& hi, std::mt19937_64& rng,
                                 std::int64_t max_denominator) {
  if (!(lo < hi)) throw std::invalid_argument("random_rational_between: empty interval");
  if (max_denominator < 2) throw std::invalid_argument("random_rational_between: max_denominator < 2");
  std::uniform_int_distribution<std::int64_t> den_dist(2, max_denominator);
  const std::int64_t den = den_dist(rng);
  std::uniform_int_distribution<std::int64_t> num_dist(1, den - 1);
  return lo + (hi - lo) * Rational(num_dist(rng), den);
}

ParamPoint sample_in_range(int n, std::mt19937_64& rng, std::int64_t max_denominator) {
  const Rational alpha = random_rational_between(range_alpha_lower(n), Rational(n), rng, max_denominator);
  const Rational upper = range_upper_bound(n, alpha);
  std::uniform_int_distribution<std::int64_t> den_dist(1, max_denominator);
  const std::int64_t den = den_dist(rng);
  std::uniform_int_distribution<std::int64_t> num_dist(1, den);
  return ParamPoint(n, alpha, upper * Rational(num_dist(rng), den));
}

std::vector<ParamPoint> sample_in_range(int n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ParamPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_in_range(n, rng));
  return out;
}

}  // namespace hartree
