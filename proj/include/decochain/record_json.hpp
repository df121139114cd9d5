#pragma once

#include <json.hpp>

#include "decochain/observables.hpp"

namespace decochain {

// core observable fields only (chi, strings, EE/ES, purity, trace); callers
// that need solver metadata add it beside these keys, and record_from_json
// picks it up when present
nlohmann::json record_to_json(const ObservableRecord& r);
ObservableRecord record_from_json(const nlohmann::json& j);

}  // namespace decochain
