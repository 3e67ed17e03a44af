#include "matfactor/forecast.hpp"

#include "matfactor/error.hpp"

#include <cmath>
#include <string>

namespace matfactor {

Ar1Coefficients fit_ar1(const Vector& x) {
  const Eigen::Index T = x.size();
  require(T >= 3, ErrorKind::InsufficientData, "fit_ar1: need at least 3 observations");
  require(x.allFinite(), ErrorKind::InvalidInput, "fit_ar1: non-finite values");
  const auto lag = x.head(T - 1);
  const auto lead = x.tail(T - 1);
  const double lag_mean = lag.mean();
  const double lead_mean = lead.mean();
  const double sxx = (lag.array() - lag_mean).square().sum();
  const bool constant = (x.array() == x(0)).all();
  require(!constant && sxx > 0.0, ErrorKind::DegenerateSeries,
          "fit_ar1: series has zero variance");
  const double sxy = ((lag.array() - lag_mean) * (lead.array() - lead_mean)).sum();
  Ar1Coefficients c;
  c.phi = sxy / sxx;
  c.intercept = lead_mean - c.phi * lag_mean;
  return c;
}

FactorDynamics fit_factor_dynamics(const MatrixSeries& x) {
  FactorDynamics dyn;
  dyn.phi = Matrix::Zero(x.rows(), x.cols());
  dyn.intercept = Matrix::Zero(x.rows(), x.cols());
  const Matrix& data = x.stacked();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Vector path = data.row(j * x.rows() + i).transpose();
      if (path.size() > 0 && (path.array() == path(0)).all()) {
        dyn.intercept(i, j) = path(0);
        continue;
      }
      const Ar1Coefficients c = fit_ar1(path);
      dyn.phi(i, j) = c.phi;
      dyn.intercept(i, j) = c.intercept;
    }
  }
  return dyn;
}

Matrix chain_forecast(const FactorDynamics& dyn, const Matrix& last, int h) {
  require(h >= 1, ErrorKind::InvalidInput, "forecast: horizon must be >= 1");
  require(dyn.phi.rows() == last.rows() && dyn.phi.cols() == last.cols(),
          ErrorKind::InvalidInput, "forecast: coefficient shape mismatch");
  Matrix geometric = Matrix::Zero(last.rows(), last.cols());  // sum_{s<h} phi^s
  Matrix power = Matrix::Ones(last.rows(), last.cols());      // phi^s
  for (int s = 0; s < h; ++s) {
    geometric += power;
    power = power.cwiseProduct(dyn.phi);
  }
  return dyn.intercept.cwiseProduct(geometric) + power.cwiseProduct(last);
}

Matrix forecast_panel(const FactorFit& fit, const FactorDynamics& dyn, int h) {
  require(fit.X_hat.length() >= 1, ErrorKind::InvalidInput, "forecast_panel: empty factor series");
  const Matrix x = chain_forecast(dyn, fit.X_hat.at(fit.X_hat.length() - 1), h);
  Matrix out = fit.A1_hat * x * fit.P1_hat.transpose();
  if (fit.center.size() == out.size()) out += fit.center;
  return out;
}

Matrix forecast_panel(const FactorFit& fit, int h) {
  return forecast_panel(fit, fit_factor_dynamics(fit.X_hat), h);
}

std::string_view to_string(ForecastMethod method) noexcept {
  return method == ForecastMethod::Proposed ? "proposed" : "initial";
}

ForecastMethod parse_forecast_method(std::string_view name) {
  if (name == "proposed") return ForecastMethod::Proposed;
  if (name == "initial") return ForecastMethod::InitialOnly;
  fail(ErrorKind::InvalidInput, "unknown forecast method '" + std::string(name) + "'");
}

RollingWindow trailing_window(Eigen::Index T, Eigen::Index n) {
  require(n >= 1 && n < T, ErrorKind::InvalidInput, "trailing_window: need 1 <= n < T");
  return RollingWindow{T - n, std::nullopt};
}

namespace {

struct WindowRange {
  Eigen::Index first;
  Eigen::Index last;
};

WindowRange resolve(const RollingWindow& window, Eigen::Index T, int h) {
  require(h >= 1, ErrorKind::InvalidInput, "rolling_evaluate: horizon must be >= 1");
  Eigen::Index last = T - h;
  if (window.last_origin) last = std::min(last, *window.last_origin);
  require(window.first_origin >= 1 && window.first_origin <= last, ErrorKind::InvalidInput,
          "rolling_evaluate: window origins must lie in [1, T - h] (h = " + std::to_string(h) +
              ")");
  return {window.first_origin, last};
}

void accumulate(ForecastEvaluation& ev, const Matrix& forecast, const Matrix& truth) {
  const double scale = std::sqrt(static_cast<double>(truth.size()));
  const Matrix diff = forecast - truth;
  const double fro = diff.norm() / scale;
  const double spec = Eigen::JacobiSVD<Matrix>(diff).singularValues()(0) / scale;
  ev.window_frobenius.push_back(fro);
  ev.window_spectral.push_back(spec);
}

void finish(ForecastEvaluation& ev) {
  ev.n_windows = static_cast<int>(ev.window_frobenius.size());
  double f = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < ev.window_frobenius.size(); ++i) {
    f += ev.window_frobenius[i];
    s += ev.window_spectral[i];
  }
  ev.fe_frobenius = ev.n_windows > 0 ? f / ev.n_windows : 0.0;
  ev.fe_spectral = ev.n_windows > 0 ? s / ev.n_windows : 0.0;
}

}  // namespace

std::vector<ForecastEvaluation> rolling_evaluate(const MatrixSeries& y,
                                                 const EstimationConfig& cfg,
                                                 const std::vector<int>& horizons,
                                                 const RollingWindow& window,
                                                 const RollingOptions& options) {
  require(!horizons.empty(), ErrorKind::InvalidInput, "rolling_evaluate: no horizons given");
  const Eigen::Index T = y.length();
  std::vector<ForecastEvaluation> results(horizons.size());
  std::vector<WindowRange> ranges;
  Eigen::Index last_needed = 0;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    ranges.push_back(resolve(window, T, horizons[i]));
    results[i].h = horizons[i];
    results[i].method = options.method;
    last_needed = std::max(last_needed, ranges.back().last);
  }
  require(window.first_origin > cfg.k0 + cfg.m, ErrorKind::InsufficientData,
          "rolling_evaluate: the first window is too short to fit the model");

  EstimationConfig run_cfg = cfg;
  if (options.method == ForecastMethod::InitialOnly) run_cfg.s0 = 0;
  FitOptions fit_options;
  for (Eigen::Index tau = window.first_origin; tau <= last_needed; ++tau) {
    const FactorFit model = fit(y.head(tau), run_cfg, fit_options);
    if (options.freeze_orders && !fit_options.fixed_orders)
      fit_options.fixed_orders = std::pair<int, int>(model.r1_hat, model.r2_hat);
    const FactorDynamics dyn = fit_factor_dynamics(model.X_hat);
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      if (tau > ranges[i].last) continue;
      const int h = horizons[i];
      // Origin tau is 1-based, so Y_{tau+h} sits at 0-based index tau+h-1.
      accumulate(results[i], forecast_panel(model, dyn, h), y.at(tau + h - 1));
    }
  }
  for (auto& r : results) finish(r);
  return results;
}

ForecastEvaluation rolling_evaluate(const MatrixSeries& y, const EstimationConfig& cfg, int h,
                                    const RollingWindow& window, const RollingOptions& options) {
  return rolling_evaluate(y, cfg, std::vector<int>{h}, window, options).front();
}

ForecastEvaluation rolling_evaluate(const MatrixSeries& y, const Forecaster& forecaster, int h,
                                    const RollingWindow& window) {
  const WindowRange range = resolve(window, y.length(), h);
  ForecastEvaluation ev;
  ev.h = h;
  for (Eigen::Index tau = range.first; tau <= range.last; ++tau)
    accumulate(ev, forecaster(y.head(tau), h), y.at(tau + h - 1));
  finish(ev);
  return ev;
}

}  // namespace matfactor
