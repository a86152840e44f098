#pragma once

// JSON views of the fit and report types. Doubles are written with 17
// significant digits through a locale-independent formatter; NaN and infinities
// become null.

#include <string>

#include <nlohmann/json.hpp>

#include "hfa/diagnostics.hpp"
#include "hfa/fixed_model.hpp"
#include "hfa/mixed_model.hpp"
#include "hfa/phase2.hpp"
#include "hfa/schedule.hpp"
#include "hfa/simulation.hpp"

namespace hfa::json {

using Json = nlohmann::ordered_json;

Json to_json(const EstimabilityReport& report);
Json to_json(const FixedFit& fit);
Json to_json(const MixedFit& fit);
Json to_json(const DiagnosticResult& result);
Json to_json(const SimulationReport& report);
Json to_json(const ModelSummary& summary);
Json to_json(const Coefficient& coefficient);
Json to_json(const RandomCoefFit& fit);
Json to_json(const FixedTrendFit& fit);
Json to_json(const LrtResult& result);
Json to_json(const BoundaryTestResult& result);

/// Shortest form is not used; every double gets 17 significant digits.
std::string format_double(double value);

/// Serialises with two-space indentation and a trailing newline.
std::string dump(const Json& value);

}  // namespace hfa::json
