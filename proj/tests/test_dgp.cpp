#include "helpers.hpp"
#include "matfactor/dgp.hpp"
#include "matfactor/error.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace matfactor;
using namespace testing_support;

namespace {

double lag1_autocorrelation(const Vector& x) {
  const Vector c = x.array() - x.mean();
  const Eigen::Index T = c.size();
  return c.tail(T - 1).dot(c.head(T - 1)) / c.squaredNorm();
}

Matrix empirical_cov(const Matrix& stacked) {
  const Matrix c = stacked.colwise() - stacked.rowwise().mean();
  return c * c.transpose() / static_cast<double>(stacked.cols());
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SimScenario small_scenario(int T, std::uint64_t seed) {
  SimScenario s;
  s.p1 = 3;
  s.p2 = 3;
  s.r1 = 1;
  s.r2 = 1;
  s.k1 = 0;
  s.k2 = 0;
  s.T = T;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("dgp") {
  TEST_CASE("make_loading scaling") {
    Rng rng(1);
    const Matrix raw = make_loading(30, 4, 0.0, rng);
    CHECK(raw.cwiseAbs().maxCoeff() <= 2.0);
    const Matrix scaled = make_loading(100, 2, 0.99, rng);
    CHECK(scaled.cwiseAbs().maxCoeff() <= 2.0 * std::pow(100.0, -0.495));

    // Second moment of U(-2, 2) is 4/3.
    const int p = 50;
    const double delta = 0.4;
    double total = 0.0;
    int count = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
      Rng r(1000 + s);
      const Matrix l = make_loading(p, 2, delta, r);
      for (Eigen::Index j = 0; j < l.cols(); ++j, ++count) total += l.col(j).squaredNorm();
    }
    const double expected = 4.0 / 3.0 * std::pow(p, 1.0 - delta);
    CHECK(total / count == doctest::Approx(expected).epsilon(0.10));

    CHECK_THROWS_AS(make_loading(3, 4, 0.0, rng), Error);
  }

  TEST_CASE("make_noise_mixer column scaling") {
    Rng rng(2);
    const Matrix bounded = make_noise_mixer(10, 0, 0.5, rng);
    CHECK(bounded.cwiseAbs().maxCoeff() <= 0.2);
    const Matrix raw = make_noise_mixer(10, 10, 0.0, rng);
    CHECK(raw.cwiseAbs().maxCoeff() <= 2.0);
    CHECK(raw.cwiseAbs().maxCoeff() > 0.2);
    CHECK_THROWS_AS(make_noise_mixer(4, 5, 0.0, rng), Error);
  }

  TEST_CASE("make_noise_mixer produces a spiked covariance") {
    int spiked = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      Rng rng(500 + s);
      const Matrix l2 = make_noise_mixer(20, 1, 0.2, rng);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(l2 * l2.transpose());
      const Vector& v = eig.eigenvalues();
      if (v(19) >= 5.0 * v(18)) ++spiked;
    }
    CHECK(spiked >= 190);
  }

  TEST_CASE("factor VAR with zero coefficients is white") {
    Rng rng(3);
    const int T = 4000;
    const FactorPath path = simulate_factor_var(Vector::Zero(2), Vector::Zero(2), T, 10, rng);
    for (Eigen::Index e = 0; e < 4; ++e) {
      const Vector x = path.F.stacked().row(e).transpose();
      CHECK(std::abs(lag1_autocorrelation(x)) < 3.0 / std::sqrt(static_cast<double>(T)));
    }
  }

  TEST_CASE("scalar factor VAR autocorrelation matches phi * psi") {
    Rng rng(4);
    Vector phi(1), psi(1);
    phi << 1.0;
    psi << 0.8;
    const FactorPath path = simulate_factor_var(phi, psi, 5000, 100, rng);
    const Vector x = path.F.stacked().row(0).transpose();
    CHECK(lag1_autocorrelation(x) == doctest::Approx(0.8).epsilon(0.0625));
  }

  TEST_CASE("factor VAR coefficients and stationarity") {
    Rng rng(5);
    const FactorPath path = simulate_factor_var(2, 3, 10000, 100, rng);
    for (Eigen::Index i = 0; i < 2; ++i) {
      CHECK(path.Phi(i, i) > 0.5);
      CHECK(path.Phi(i, i) < 0.9);
    }
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(path.Psi(j, j) > 0.5);
      CHECK(path.Psi(j, j) < 0.9);
    }
    CHECK(path.Phi.isDiagonal());
    CHECK(path.F.stacked().cwiseAbs().maxCoeff() < 50.0);
  }

  TEST_CASE("noiseless panel equals the signal exactly") {
    SimScenario s;
    s.T = 200;
    PanelOptions o;
    o.noiseless = true;
    const SimulatedPanel panel = simulate_panel(s, o);
    CHECK(panel.Y == panel.truth.signal());
  }

  TEST_CASE("panel assembly and determinism") {
    SimScenario s;
    s.T = 300;
    const SimulatedPanel a = simulate_panel(s);
    const SimulatedPanel b = simulate_panel(s);
    CHECK(a.Y == b.Y);
    CHECK(a.truth.L1 == b.truth.L1);

    for (Eigen::Index t = 0; t < s.T; t += 37) {
      const Matrix expected = a.truth.L1 * a.truth.F.at(t) * a.truth.R1.transpose() + a.truth.E.at(t);
      CHECK((Matrix(a.Y.at(t)) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    SimScenario other = s;
    other.seed = s.seed + 1;
    CHECK_FALSE(simulate_panel(other).Y == a.Y);
  }

  TEST_CASE("path_seed keeps loadings and redraws the paths") {
    SimScenario s;
    s.T = 100;
    PanelOptions o1, o2;
    o1.path_seed = 11;
    o2.path_seed = 12;
    const auto a = simulate_panel(s, o1);
    const auto b = simulate_panel(s, o2);
    CHECK(a.truth.L1 == b.truth.L1);
    CHECK(a.truth.R2 == b.truth.R2);
    CHECK(a.truth.Phi == b.truth.Phi);
    CHECK_FALSE(a.truth.F == b.truth.F);
  }

  TEST_CASE("loading column norms follow the strength exponent") {
    SimScenario s;
    s.p1 = 40;
    s.p2 = 30;
    s.delta1 = 0.5;
    s.T = 5;
    double total = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      s.seed = seed;
      const auto panel = simulate_panel(s);
      for (Eigen::Index j = 0; j < panel.truth.L1.cols(); ++j, ++count)
        total += panel.truth.L1.col(j).squaredNorm();
    }
    const double target = std::pow(40.0, 1.0 - s.delta1);
    CHECK(total / count > target / 3.0);
    CHECK(total / count < target * 3.0);
  }

  TEST_CASE("noise covariance converges to the Kronecker product") {
    double err_small = 0.0;
    double err_large = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto big = simulate_panel(small_scenario(20000, seed));
      const Matrix target = kronecker(big.truth.R2 * big.truth.R2.transpose(),
                                      big.truth.L2 * big.truth.L2.transpose());
      const Matrix cov = empirical_cov(big.truth.E.stacked());
      CHECK((cov - target).cwiseAbs().maxCoeff() < 0.1);

      const auto s1 = simulate_panel(small_scenario(1000, seed + 10));
      const auto s2 = simulate_panel(small_scenario(10000, seed + 10));
      const Matrix t1 = kronecker(s1.truth.R2 * s1.truth.R2.transpose(),
                                  s1.truth.L2 * s1.truth.L2.transpose());
      err_small += (empirical_cov(s1.truth.E.stacked()) - t1).norm() / t1.norm();
      err_large += (empirical_cov(s2.truth.E.stacked()) - t1).norm() / t1.norm();
    }
    // A tenfold sample should shrink the error by about sqrt(10).
    CHECK(err_large < 0.6 * err_small);
  }

  TEST_CASE("noise is uncorrelated with the factors") {
    SimScenario s;
    s.T = 4000;
    const auto panel = simulate_panel(s);
    const Matrix e = panel.truth.E.stacked();
    const Matrix f = panel.truth.F.stacked();
    const double bound = 6.0 / std::sqrt(static_cast<double>(s.T));
    for (int lag = -5; lag <= 5; ++lag) {
      const Eigen::Index n = s.T - std::abs(lag);
      const Matrix ee = lag >= 0 ? Matrix(e.rightCols(n)) : Matrix(e.leftCols(n));
      const Matrix ff = lag >= 0 ? Matrix(f.leftCols(n)) : Matrix(f.rightCols(n));
      const Matrix ec = ee.colwise() - ee.rowwise().mean();
      const Matrix fc = ff.colwise() - ff.rowwise().mean();
      const Vector se = ec.rowwise().norm();
      const Vector sf = fc.rowwise().norm();
      const Matrix corr = se.cwiseInverse().asDiagonal() * (ec * fc.transpose()) *
                          sf.cwiseInverse().asDiagonal();
      CHECK(corr.cwiseAbs().maxCoeff() < bound);
    }
  }

  TEST_CASE("scenario validation") {
    SimScenario s;
    s.r1 = 7;
    CHECK_THROWS_AS(s.validate(), Error);
    s = SimScenario{};
    s.delta1 = 1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s = SimScenario{};
    s.k2 = 8;
    CHECK_THROWS_AS(s.validate(), Error);
    s = SimScenario{};
    CHECK_NOTHROW(s.validate());
  }
}
