#include "apcone/plane_json.hpp"

#include "apcone/errors.hpp"

namespace apcone {

PlaneSpec plane_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("plane: expected an object");
  for (const auto& [key, value] : j.items())
    if (key != "kind" && key != "c" && key != "mu" && key != "theta" && key != "reflect")
      throw DomainError("plane: unknown key '" + key + "'");

  PlaneSpec s;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "type1" && kind != "type2")
      throw DomainError("plane: kind must be \"type1\" or \"type2\"");
    s.kind = kind == "type1" ? PlaneKind::type1 : PlaneKind::type2;
    s.c = j.at("c").get<std::vector<double>>();
    if (s.kind == PlaneKind::type1) s.mu = j.at("mu").get<double>();
    else if (j.contains("mu")) throw DomainError("plane: mu only applies to Type 1");
    s.theta = j.value("theta", 0.0);
    s.reflect = j.value("reflect", false);
  } catch (const nlohmann::json::exception& ex) {
    throw DomainError(std::string("plane: ") + ex.what());
  }
  s.validate();
  return s;
}

nlohmann::json plane_spec_to_json(const PlaneSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind == PlaneKind::type1 ? "type1" : "type2";
  j["c"] = spec.c;
  if (spec.kind == PlaneKind::type1) j["mu"] = spec.mu;
  j["theta"] = spec.theta;
  j["reflect"] = spec.reflect;
  return j;
}

}  // namespace apcone
