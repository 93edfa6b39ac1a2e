// JSON serialization of reports (schema 1) and the provenance block.
#pragma once

#include "s2s/correlation.hpp"
#include "s2s/params.hpp"

#include <json.hpp>

namespace s2s {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json report_json(const ExperimentReport& r, bool include_runtime = true);
// D0, W, R, v, B and the rest of the derived bundle.
Json provenance_json(const SieveParams& p, const DerivedParams& d);
Json params_json(const SieveParams& p);

// Decimal with enough digits to round-trip a double; non-finite values become null.
Json number_json(double v);

}  // namespace s2s
