#pragma once

#include <json.hpp>

#include "strw/derivation.hpp"

namespace strw {

nlohmann::json derivation_to_json(const DerivPtr& d);

// Rebuilds the tree verbatim from JSON (terms and types re-parsed from
// their string forms). Performs no validation; run check() on the result.
DerivPtr derivation_from_json(const nlohmann::json& j);

}  // namespace strw
