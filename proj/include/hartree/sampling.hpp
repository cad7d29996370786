#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hartree/exponent_core.hpp"

namespace hartree {

/// Uniform-ish random rational strictly between lo and hi: a random
/// denominator in [2, max_denominator] and a random interior numerator.
Rational random_rational_between(const Rational& lo, const Rational& hi, std::mt19937_64& rng,
                                 std::int64_t max_denominator = 10000);

/// Random point of the admissible range for dimension n. b ranges over
/// (0, (alpha - n + 4)/2] and can land exactly on the upper edge.
ParamPoint sample_in_range(int n, std::mt19937_64& rng, std::int64_t max_denominator = 10000);

std::vector<ParamPoint> sample_in_range(int n, std::size_t count, std::uint64_t seed);

}  // namespace hartree
