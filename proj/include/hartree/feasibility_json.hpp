#pragma once

#include <string>

#include "json.hpp"

#include "hartree/feasibility.hpp"

namespace hartree {

/// {"params": {...}, "constraints": [{label, block, kind, redundant, lhs, rhs}]}
/// with every rational written as an "a/b" string and zero coefficients omitted.
nlohmann::json to_json(const ConstraintSet& set);
ConstraintSet constraint_set_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const ExponentAssignment& witness);

}  // namespace hartree
