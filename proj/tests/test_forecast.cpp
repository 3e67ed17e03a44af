#include "helpers.hpp"
#include "matfactor/dgp.hpp"
#include "matfactor/error.hpp"
#include "matfactor/forecast.hpp"

#include <doctest.h>

#include <cmath>

using namespace matfactor;
using namespace testing_support;

namespace {

SimulatedPanel small_panel(int T, std::uint64_t seed) {
  SimScenario s;
  s.p1 = 5;
  s.p2 = 4;
  s.r1 = 1;
  s.r2 = 2;
  s.k1 = 0;
  s.k2 = 0;
  s.T = T;
  s.seed = seed;
  return simulate_panel(s);
}

EstimationConfig fast_config() {
  EstimationConfig cfg;
  cfg.m = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("forecast") {
  TEST_CASE("fit_ar1 recovers a deterministic recursion") {
    Vector x(30);
    x(0) = 0.0;
    for (Eigen::Index t = 1; t < x.size(); ++t) x(t) = 0.5 * x(t - 1) + 1.0;
    const Ar1Coefficients c = fit_ar1(x);
    CHECK(c.phi == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(c.intercept == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("fit_ar1 is consistent") {
    const Vector x = ar1_rows(5000, 1, 0.7, 3).col(0);
    const Ar1Coefficients c = fit_ar1(x);
    CHECK(std::abs(c.phi - 0.7) < 0.03);
    CHECK(std::abs(c.intercept) < 0.1);
  }

  TEST_CASE("fit_ar1 errors") {
    try {
      fit_ar1(Vector::Constant(10, 2.0));
      FAIL("expected DegenerateSeries");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateSeries);
    }
    try {
      fit_ar1(Vector::Ones(2));
      FAIL("expected InsufficientData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientData);
    }
  }

  TEST_CASE("fit_factor_dynamics handles constant entries") {
    MatrixSeries x(1, 2, 50);
    const Vector ar = ar1_rows(50, 1, 0.4, 4).col(0);
    for (Eigen::Index t = 0; t < 50; ++t) {
      Matrix v(1, 2);
      v << ar(t), 3.0;
      x.set(t, v);
    }
    const FactorDynamics dyn = fit_factor_dynamics(x);
    CHECK(dyn.phi(0, 1) == 0.0);
    CHECK(dyn.intercept(0, 1) == 3.0);
    CHECK(dyn.phi(0, 0) == doctest::Approx(fit_ar1(ar).phi));
    const Matrix f = chain_forecast(dyn, x.at(49), 4);
    CHECK(f(0, 1) == 3.0);
  }

  TEST_CASE("chain_forecast equals repeated one-step forecasts") {
    FactorDynamics dyn;
    dyn.phi = normal_matrix(2, 3, 5) * 0.3;
    dyn.intercept = normal_matrix(2, 3, 6);
    const Matrix last = normal_matrix(2, 3, 7);
    Matrix manual = last;
    for (int s = 0; s < 3; ++s)
      manual = (dyn.intercept.array() + dyn.phi.array() * manual.array()).matrix();
    CHECK((chain_forecast(dyn, last, 3) - manual).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((chain_forecast(dyn, last, 1) -
           Matrix(dyn.intercept.array() + dyn.phi.array() * last.array()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    FactorDynamics zero{Matrix::Zero(2, 3), Matrix::Zero(2, 3)};
    CHECK(chain_forecast(zero, last, 5).isZero());
    CHECK_THROWS_AS(chain_forecast(dyn, last, 0), Error);
  }

  TEST_CASE("forecast_panel maps the factor forecast through the loadings") {
    const auto panel = small_panel(300, 8);
    const FactorFit f = fit(panel.Y, fast_config());
    const FactorDynamics dyn = fit_factor_dynamics(f.X_hat);
    const Matrix x_next = chain_forecast(dyn, f.X_hat.at(f.X_hat.length() - 1), 2);
    const Matrix expected = f.center + f.A1_hat * x_next * f.P1_hat.transpose();
    CHECK((forecast_panel(f, 2) - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((forecast_panel(f, dyn, 2) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("perfect foresight gives zero forecast error") {
    const auto panel = small_panel(120, 9);
    const MatrixSeries& y = panel.Y;
    const Forecaster oracle = [&y](const MatrixSeries& history, int h) {
      return Matrix(y.at(history.length() - 1 + h));
    };
    const ForecastEvaluation e = rolling_evaluate(y, oracle, 2, trailing_window(120, 20));
    CHECK(e.fe_frobenius == 0.0);
    CHECK(e.fe_spectral == 0.0);
    CHECK(e.n_windows == 19);  // origins 100..118 leave room for h = 2
  }

  TEST_CASE("a constant panel is forecast exactly by its last value") {
    const MatrixSeries y(2, 3, Matrix::Constant(6, 40, 1.5));
    const Forecaster last = [](const MatrixSeries& history, int) {
      return Matrix(history.at(history.length() - 1));
    };
    const ForecastEvaluation e = rolling_evaluate(y, last, 1, RollingWindow{30, std::nullopt});
    CHECK(e.fe_frobenius < 1e-15);
    CHECK(e.n_windows == 10);
  }

  TEST_CASE("window errors respect norm equivalence") {
    const auto panel = small_panel(200, 10);
    const ForecastEvaluation e =
        rolling_evaluate(panel.Y, fast_config(), 1, trailing_window(200, 6));
    REQUIRE(e.n_windows == 6);
    REQUIRE(e.window_frobenius.size() == 6);
    const double root_rank = std::sqrt(4.0);
    for (std::size_t w = 0; w < e.window_frobenius.size(); ++w) {
      CHECK(e.window_spectral[w] <= e.window_frobenius[w] + 1e-12);
      CHECK(e.window_frobenius[w] <= root_rank * e.window_spectral[w] + 1e-12);
    }
    double mean = 0.0;
    for (double v : e.window_frobenius) mean += v;
    CHECK(e.fe_frobenius == doctest::Approx(mean / 6.0));
  }

  TEST_CASE("one fit serves every horizon") {
    const auto panel = small_panel(200, 11);
    const RollingWindow window = trailing_window(200, 5);
    const auto multi = rolling_evaluate(panel.Y, fast_config(), {1, 2}, window);
    REQUIRE(multi.size() == 2);
    const auto h1 = rolling_evaluate(panel.Y, fast_config(), 1, window);
    const auto h2 = rolling_evaluate(panel.Y, fast_config(), 2, window);
    CHECK(multi[0].h == 1);
    CHECK(multi[1].h == 2);
    CHECK(multi[0].fe_frobenius == h1.fe_frobenius);
    CHECK(multi[1].fe_frobenius == h2.fe_frobenius);
    CHECK(multi[1].n_windows == 4);
  }

  TEST_CASE("forecast method names") {
    CHECK(parse_forecast_method(to_string(ForecastMethod::Proposed)) == ForecastMethod::Proposed);
    CHECK(parse_forecast_method(to_string(ForecastMethod::InitialOnly)) ==
          ForecastMethod::InitialOnly);
    CHECK_THROWS_AS(parse_forecast_method("bogus"), Error);
  }
}
