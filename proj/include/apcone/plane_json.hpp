#pragma once

#include "apcone/planes.hpp"
#include "json.hpp"

namespace apcone {

// {"kind": "type1" | "type2", "c": [c1, ...], "mu": m, "theta": a, "reflect": b}.
// mu is required for Type 1 only; theta and reflect default to 0 and false.
// Unknown keys and invalid parameters throw DomainError.
PlaneSpec plane_spec_from_json(const nlohmann::json& j);
nlohmann::json plane_spec_to_json(const PlaneSpec& spec);

}  // namespace apcone
