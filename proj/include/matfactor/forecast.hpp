#pragma once

#include "matfactor/config.hpp"
#include "matfactor/estimate.hpp"
#include "matfactor/linalg.hpp"
#include "matfactor/series.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace matfactor {

struct Ar1Coefficients {
  double phi = 0.0;
  double intercept = 0.0;
};

/// Least squares of x_t on (1, x_{t-1}). Throws DegenerateSeries for a
/// constant series and InsufficientData for T < 3.
Ar1Coefficients fit_ar1(const Vector& x);

/// Entrywise AR(1) coefficients of a factor series, r1 x r2 each.
struct FactorDynamics {
  Matrix phi;
  Matrix intercept;
};

/// Fits every factor entry. Exactly constant entries get phi = 0 and the
/// constant as intercept, so their forecast is the constant itself.
FactorDynamics fit_factor_dynamics(const MatrixSeries& x);

/// intercept * sum_{s<h} phi^s + phi^h * last, entrywise.
Matrix chain_forecast(const FactorDynamics& dyn, const Matrix& last, int h);

/// center + A1 X_{T+h|T} P1' with dynamics fitted on fit.X_hat.
Matrix forecast_panel(const FactorFit& fit, int h);
Matrix forecast_panel(const FactorFit& fit, const FactorDynamics& dyn, int h);

enum class ForecastMethod {
  /// The iterated estimator.
  Proposed,
  /// The estimator built from the initializer alone (no refinement pass).
  InitialOnly,
};

std::string_view to_string(ForecastMethod method) noexcept;
ForecastMethod parse_forecast_method(std::string_view name);

/// Forecast origins tau (1-based, the last observation used for fitting).
/// Each horizon h uses origins first_origin .. min(last_origin, T - h).
struct RollingWindow {
  Eigen::Index first_origin = 0;
  std::optional<Eigen::Index> last_origin;
};

/// The last n origins: first_origin = T - n.
RollingWindow trailing_window(Eigen::Index T, Eigen::Index n = 120);

struct ForecastEvaluation {
  ForecastMethod method = ForecastMethod::Proposed;
  int h = 1;
  double fe_frobenius = 0.0;  // mean of ||Yhat - Y||_F / sqrt(p1 p2)
  double fe_spectral = 0.0;   // mean of ||Yhat - Y||_2 / sqrt(p1 p2)
  int n_windows = 0;
  std::vector<double> window_frobenius;
  std::vector<double> window_spectral;
};

struct RollingOptions {
  ForecastMethod method = ForecastMethod::Proposed;
  /// Select (r1, r2) at the first origin only and reuse them afterwards.
  bool freeze_orders = false;
};

/// Expanding-window evaluation: at every origin tau the model is refitted on
/// Y_1..Y_tau, and the same fit serves every horizon.
std::vector<ForecastEvaluation> rolling_evaluate(const MatrixSeries& y,
                                                 const EstimationConfig& cfg,
                                                 const std::vector<int>& horizons,
                                                 const RollingWindow& window,
                                                 const RollingOptions& options = {});

ForecastEvaluation rolling_evaluate(const MatrixSeries& y, const EstimationConfig& cfg, int h,
                                    const RollingWindow& window,
                                    const RollingOptions& options = {});

/// history (the first tau observations) and h -> forecast of Y_{tau+h}.
using Forecaster = std::function<Matrix(const MatrixSeries& history, int h)>;

/// The same window scheme with a caller-supplied forecaster.
ForecastEvaluation rolling_evaluate(const MatrixSeries& y, const Forecaster& forecaster, int h,
                                    const RollingWindow& window);

}  // namespace matfactor
