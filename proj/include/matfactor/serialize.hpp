#pragma once

#include "matfactor/config.hpp"
#include "matfactor/dgp.hpp"
#include "matfactor/estimate.hpp"
#include "matfactor/linalg.hpp"
#include "matfactor/series.hpp"
#include "matfactor/wntest.hpp"

#include <json.hpp>

namespace matfactor {

using Json = nlohmann::ordered_json;

/// Row-major nested arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
/// Array of T row-major matrices.
Json series_to_json(const MatrixSeries& s);
MatrixSeries series_from_json(const Json& j);

/// Exactly the SimScenario field names; missing keys keep their defaults,
/// unknown keys are rejected.
Json scenario_to_json(const SimScenario& s);
SimScenario scenario_from_json(const Json& j);

Json config_to_json(const EstimationConfig& cfg);
/// Applies the keys present in `j` on top of `cfg`. Unknown keys are rejected.
EstimationConfig config_from_json(const Json& j, EstimationConfig cfg = {});

Json outcome_to_json(const TestOutcome& o);
Json report_to_json(const WhitenessReport& r);

Json fit_to_json(const FactorFit& fit);
/// Restores the fields needed for factor export and forecasting.
FactorFit fit_from_json(const Json& j);

/// Loadings, mixers, coefficients and the factor path; the noise path is omitted.
Json truth_to_json(const GroundTruth& g);

}  // namespace matfactor
