#include "hartree/feasibility_json.hpp"

#include <stdexcept>

namespace hartree {

namespace {

nlohmann::json form_to_json(const LinearForm& form) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (std::size_t v = 0; v < kVarCount; ++v) {
    if (!form.coeff[v].is_zero()) coeffs[std::string(to_string(static_cast<Var>(v)))] = form.coeff[v].str();
  }
  return {{"coefficients", coeffs}, {"constant", form.constant.str()}};
}

LinearForm form_from_json(const nlohmann::json& doc) {
  LinearForm form = LinearForm::constant_form(Rational::parse(doc.at("constant").get<std::string>()));
  for (const auto& [name, value] : doc.at("coefficients").items()) {
    form.coeff[index(var_from_string(name))] = Rational::parse(value.get<std::string>());
  }
  return form;
}

}  // namespace

nlohmann::json to_json(const ConstraintSet& set) {
  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& c : set.constraints) {
    constraints.push_back({{"label", c.label},
                           {"block", c.block},
                           {"kind", std::string(to_string(c.kind))},
                           {"redundant", c.redundant},
                           {"lhs", form_to_json(c.lhs)},
                           {"rhs", form_to_json(c.rhs)}});
  }
  return {{"schema", "hartree.constraint_set.v1"},
          {"params",
           {{"n", set.params.n}, {"alpha", set.params.alpha.str()}, {"b", set.params.b.str()}, {"p", set.p.str()}}},
          {"constraints", constraints}};
}

ConstraintSet constraint_set_from_json(const nlohmann::json& doc) {
  const auto& params = doc.at("params");
  ParamPoint pt(params.at("n").get<int>(), Rational::parse(params.at("alpha").get<std::string>()),
                Rational::parse(params.at("b").get<std::string>()));
  ConstraintSet set{pt, Rational::parse(params.at("p").get<std::string>()), {}};
  for (const auto& c : doc.at("constraints")) {
    set.constraints.push_back(Constraint{c.at("label").get<std::string>(), c.at("block").get<std::string>(),
                                         relation_from_string(c.at("kind").get<std::string>()),
                                         form_from_json(c.at("lhs")), form_from_json(c.at("rhs")),
                                         c.at("redundant").get<bool>()});
  }
  return set;
}

nlohmann::json to_json(const ExponentAssignment& witness) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t v = 0; v < kVarCount; ++v) {
    out[std::string(to_string(static_cast<Var>(v)))] = witness.values[v].str();
  }
  return out;
}

}  // namespace hartree
