#include "matfactor/dgp.hpp"

#include "matfactor/error.hpp"

#include <cmath>

namespace matfactor {

void SimScenario::validate() const {
  require(p1 > 0 && p2 > 0, ErrorKind::InvalidInput, "scenario: p1, p2 must be positive");
  require(r1 > 0 && r2 > 0 && r1 < p1 && r2 < p2, ErrorKind::InvalidInput,
          "scenario: need 0 < r1 < p1 and 0 < r2 < p2");
  require(k1 >= 0 && k2 >= 0 && k1 <= p1 && k2 <= p2, ErrorKind::InvalidInput,
          "scenario: need 0 <= k1 <= p1 and 0 <= k2 <= p2");
  require(delta1 >= 0.0 && delta1 < 1.0 && delta2 >= 0.0 && delta2 < 1.0,
          ErrorKind::InvalidInput, "scenario: strengths must lie in [0, 1)");
  require(T >= 1, ErrorKind::InvalidInput, "scenario: T must be at least 1");
  require(burn_in >= 0, ErrorKind::InvalidInput, "scenario: burn_in must be non-negative");
}

MatrixSeries GroundTruth::signal() const {
  MatrixSeries out(L1.rows(), R1.rows(), F.length());
  for (Eigen::Index t = 0; t < F.length(); ++t) out.at(t).noalias() = L1 * F.at(t) * R1.transpose();
  return out;
}

Matrix make_loading(int p, int r, double delta, Rng& rng) {
  require(p > 0 && r > 0 && r <= p, ErrorKind::InvalidInput, "make_loading: need 0 < r <= p");
  require(delta >= 0.0 && delta < 1.0, ErrorKind::InvalidInput, "make_loading: delta in [0,1)");
  const double scale = std::pow(static_cast<double>(p), -delta / 2.0);
  Matrix out(p, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < p; ++i) out(i, j) = rng.uniform(-2.0, 2.0) * scale;
  return out;
}

Matrix make_noise_mixer(int p, int k, double delta2, Rng& rng) {
  require(p > 0, ErrorKind::InvalidInput, "make_noise_mixer: p must be positive");
  require(k >= 0 && k <= p, ErrorKind::InvalidInput, "make_noise_mixer: need 0 <= k <= p");
  const double spiked = std::pow(static_cast<double>(p), -delta2 / 2.0);
  const double bounded = 1.0 / static_cast<double>(p);
  Matrix out(p, p);
  for (int j = 0; j < p; ++j) {
    const double scale = j < k ? spiked : bounded;
    for (int i = 0; i < p; ++i) out(i, j) = rng.uniform(-2.0, 2.0) * scale;
  }
  return out;
}

FactorPath simulate_factor_var(int r1, int r2, int T, int burn_in, Rng& rng) {
  require(r1 > 0 && r2 > 0, ErrorKind::InvalidInput, "simulate_factor_var: r1, r2 > 0");
  Vector phi(r1);
  Vector psi(r2);
  for (int i = 0; i < r1; ++i) phi(i) = rng.uniform(0.5, 0.9);
  for (int j = 0; j < r2; ++j) psi(j) = rng.uniform(0.5, 0.9);
  return simulate_factor_var(phi, psi, T, burn_in, rng);
}

FactorPath simulate_factor_var(const Vector& phi_diag, const Vector& psi_diag, int T,
                               int burn_in, Rng& rng) {
  require(T >= 1 && burn_in >= 0, ErrorKind::InvalidInput,
          "simulate_factor_var: need T >= 1 and burn_in >= 0");
  const auto r1 = phi_diag.size();
  const auto r2 = psi_diag.size();
  require(r1 > 0 && r2 > 0, ErrorKind::InvalidInput, "simulate_factor_var: empty coefficients");

  FactorPath out{MatrixSeries(r1, r2, T), phi_diag.asDiagonal(), psi_diag.asDiagonal()};
  // Diagonal Phi, Psi: entry (i,j) evolves as phi_i * psi_j * F(i,j) + N(i,j).
  const Matrix coef = phi_diag * psi_diag.transpose();
  Matrix state = Matrix::Zero(r1, r2);
  for (int step = 0; step < burn_in + T; ++step) {
    Matrix noise(r1, r2);
    for (Eigen::Index j = 0; j < r2; ++j)
      for (Eigen::Index i = 0; i < r1; ++i) noise(i, j) = rng.normal();
    state = coef.cwiseProduct(state) + noise;
    if (step >= burn_in) out.F.at(step - burn_in) = state;
  }
  return out;
}

SimulatedPanel simulate_panel(const SimScenario& s, const PanelOptions& options) {
  s.validate();
  Rng rng(s.seed);

  GroundTruth truth;
  truth.L1 = make_loading(s.p1, s.r1, s.delta1, rng);
  truth.R1 = make_loading(s.p2, s.r2, s.delta1, rng);
  truth.L2 = make_noise_mixer(s.p1, s.k1, s.delta2, rng);
  truth.R2 = make_noise_mixer(s.p2, s.k2, s.delta2, rng);
  if (options.noiseless) {
    truth.L2.setZero();
    truth.R2.setZero();
  }
  Vector phi(s.r1);
  Vector psi(s.r2);
  for (int i = 0; i < s.r1; ++i) phi(i) = rng.uniform(0.5, 0.9);
  for (int j = 0; j < s.r2; ++j) psi(j) = rng.uniform(0.5, 0.9);
  Rng path_rng = options.path_seed ? Rng(*options.path_seed) : rng;
  FactorPath path = simulate_factor_var(phi, psi, s.T, s.burn_in, path_rng);
  truth.Phi = std::move(path.Phi);
  truth.Psi = std::move(path.Psi);
  truth.F = std::move(path.F);

  truth.E = MatrixSeries(s.p1, s.p2, s.T);
  MatrixSeries Y(s.p1, s.p2, s.T);
  Matrix xi(s.p1, s.p2);
  for (int t = 0; t < s.T; ++t) {
    for (int j = 0; j < s.p2; ++j)
      for (int i = 0; i < s.p1; ++i) xi(i, j) = path_rng.normal();
    truth.E.at(t).noalias() = truth.L2 * xi * truth.R2.transpose();
    Y.at(t).noalias() = truth.L1 * truth.F.at(t) * truth.R1.transpose();
    Y.at(t) += truth.E.at(t);
  }
  return {std::move(Y), std::move(truth)};
}

}  // namespace matfactor
