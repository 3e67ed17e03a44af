#pragma once

#include "matfactor/linalg.hpp"
#include "matfactor/rng.hpp"
#include "matfactor/series.hpp"

#include <cstdint>
#include <optional>

namespace matfactor {

/// Ground-truth design of the simulated matrix factor model
///   Y_t = L1 F_t R1' + L2 xi_t R2',   F_t = Phi F_{t-1} Psi' + N_t.
struct SimScenario {
  int p1 = 7;
  int p2 = 7;
  int r1 = 2;
  int r2 = 3;
  int k1 = 1;
  int k2 = 2;
  double delta1 = 0.0;
  double delta2 = 0.0;
  int T = 1000;
  int burn_in = 100;
  std::uint64_t seed = 1234;

  /// Throws InvalidInput when an invariant fails.
  void validate() const;
};

struct FactorPath {
  MatrixSeries F;  // T observations, r1 x r2
  Matrix Phi;      // diagonal r1 x r1
  Matrix Psi;      // diagonal r2 x r2
};

struct GroundTruth {
  Matrix L1;  // p1 x r1
  Matrix R1;  // p2 x r2
  Matrix L2;  // p1 x p1, Sigma_r = L2 L2'
  Matrix R2;  // p2 x p2, Sigma_c = R2 R2'
  Matrix Phi;
  Matrix Psi;
  MatrixSeries F;
  MatrixSeries E;

  /// L1 F_t R1' for every t.
  MatrixSeries signal() const;
};

struct SimulatedPanel {
  MatrixSeries Y;
  GroundTruth truth;
};

/// U(-2,2) entries scaled by p^{-delta/2}. Column-major draw order.
Matrix make_loading(int p, int r, double delta, Rng& rng);

/// U(-2,2) entries; the first k columns are scaled by p^{-delta2/2} and the
/// remaining p - k columns by 1/p.
Matrix make_noise_mixer(int p, int k, double delta2, Rng& rng);

/// Diagonals of Phi and Psi drawn from U(0.5, 0.9), then the path.
FactorPath simulate_factor_var(int r1, int r2, int T, int burn_in, Rng& rng);

/// Path with caller-supplied diagonal coefficients. F_0 = 0 and the first
/// burn_in steps are discarded; N_t has iid N(0,1) entries.
FactorPath simulate_factor_var(const Vector& phi_diag, const Vector& psi_diag, int T,
                               int burn_in, Rng& rng);

struct PanelOptions {
  /// Forces L2 = R2 = 0 so that Y_t = L1 F_t R1'.
  bool noiseless = false;
  /// When set, loadings and VAR coefficients still come from scenario.seed but
  /// the time paths (N_t, xi_t) use a separate stream with this seed.
  std::optional<std::uint64_t> path_seed;
};

/// Draws L1, R1, L2, R2, Phi, Psi and then the time paths (N_t including
/// burn-in, then xi_t) from one stream seeded by scenario.seed.
SimulatedPanel simulate_panel(const SimScenario& scenario, const PanelOptions& options = {});

}  // namespace matfactor
