#pragma once

#include <string>

#include "json.hpp"

#include "dynpanel/experiment.hpp"
#include "dynpanel/inference.hpp"
#include "dynpanel/solver.hpp"

namespace dynpanel {

using Json = nlohmann::ordered_json;

/// Pretty-printed JSON with every floating-point number written using 17
/// significant digits; non-finite numbers become null.
std::string dump_json(const Json& value);

Json to_json(const DgpConfig& config);
Json to_json(const ExperimentConfig& config);
/// {config, seed, results, mc_error, excluded}; gamma indices are 1-based.
Json to_json(const ExperimentReport& report);
Json to_json(const LassoFit& fit);
/// Indices reported 1-based.
Json to_json(const InferenceResult& ci);
Json to_json(const WaldTest& test);

}  // namespace dynpanel
