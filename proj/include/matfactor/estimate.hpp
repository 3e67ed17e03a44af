#pragma once

#include "matfactor/config.hpp"
#include "matfactor/linalg.hpp"
#include "matfactor/series.hpp"
#include "matfactor/subspace.hpp"
#include "matfactor/wntest.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace matfactor {

enum class MomentKind { M1, M2, M1Star, M2Star, S1, S2 };

std::string_view to_string(MomentKind kind) noexcept;

struct MomentMatrix {
  Matrix matrix;
  MomentKind kind = MomentKind::M1;
  /// Lag budget for the autocovariance kinds; empty for S1/S2.
  std::optional<int> k0;
};

/// (1/T) sum_{t=k+1..T} y_{i,t} y_{j,t-k}' for 0-based column indices i, j.
Matrix col_autocov(const MatrixSeries& y, Eigen::Index i, Eigen::Index j, int k);

/// sum_{k=1..k0} sum_{i,j} S_ij(k) S_ij(k)' over the columns of every Y_t.
MomentMatrix build_m1(const MatrixSeries& y, int k0);
/// build_m1 of the transposed panel.
MomentMatrix build_m2(const MatrixSeries& y, int k0);
/// build_m1 of Y_t P.
MomentMatrix build_m_star(const MatrixSeries& y, const Matrix& back, int k0);
/// build_m1 of Y_t' A, the front-projected mirror.
MomentMatrix build_m_star_front(const MatrixSeries& y, const Matrix& front, int k0);

struct LoadingIterate {
  OrthonormalBasis A;  // leading r1_0 columns of gamma1
  OrthonormalBasis P;  // leading r2_0 columns of gamma2
  Matrix gamma1;       // full eigenbasis of the last front moment matrix
  Matrix gamma2;       // full eigenbasis of the last back moment matrix
  Vector values1;
  Vector values2;
  int n_iter = 0;      // refinement passes after the mandatory first one
  bool converged = false;
  /// Distances between successive front and back iterates, one pair per pass.
  std::vector<std::pair<double, double>> steps;
};

/// Alternating one-sided projections. The first pass (from P_init) always
/// runs; up to cfg.s0 further passes follow until both successive distances
/// drop below cfg.eta.
LoadingIterate iterate_loadings(const MatrixSeries& y, int r1_0, int r2_0, const Matrix& P_init,
                                const EstimationConfig& cfg);

/// sum_i Omega_i Omega_i' with Omega_i = (1/T) sum_t y_{i,t} vec(B1' Y_t Q1)'.
/// No mean is removed.
MomentMatrix build_s1(const MatrixSeries& y, const Matrix& B1, const Matrix& Q1);
/// build_s1 on the transposed panel with the roles of B1 and Q1 swapped.
MomentMatrix build_s2(const MatrixSeries& y, const Matrix& B1, const Matrix& Q1);

/// 1-based argmin_{1<=j<=R} lambda_{j+1}/lambda_j; values below 1e-12*lambda_1
/// are floored first and ties go to the smallest j.
int ratio_min(const Vector& eigenvalues, int R);

/// Eigenvalue-ratio order of a moment matrix spectrum with R = floor(p/2).
int wlc_order(const Vector& eigenvalues);

struct MitigationSubspace {
  Matrix basis;       // B2 C with C the top r eigenvectors of B2' A A' B2
  Vector alignment;   // the r leading eigenvalues of B2' A A' B2
  bool degenerate = false;
};

MitigationSubspace select_mitigation_subspace(const Matrix& B2, const Matrix& A1, int r);

/// X_t = (B2*' A)^{-1} B2*' Y_t Q2* (P' Q2*)^{-1}. Throws SingularBracket when
/// either bracket has sigma_min < 1e-8.
MatrixSeries recover_factors(const MatrixSeries& y, const Matrix& A1, const Matrix& P1,
                             const Matrix& B2_star, const Matrix& Q2_star);

struct FitOptions {
  /// Back-loading initializer; any full-column-rank p2 x c matrix whose span
  /// is used. Overrides cfg.init. Completed with first-stage directions when
  /// c is below the initial back order.
  std::optional<Matrix> initial_back;
  /// Skip both order searches and use these orders throughout.
  std::optional<std::pair<int, int>> fixed_orders;
  /// Use these spike counts (k1, k2) instead of the eigenvalue-ratio estimates.
  std::optional<std::pair<int, int>> fixed_noise_orders;
};

struct FactorFit {
  Matrix A1_hat;   // p1 x r1
  Matrix P1_hat;   // p2 x r2
  Matrix B1_hat;   // p1 x (p1 - r1)
  Matrix Q1_hat;   // p2 x (p2 - r2)
  Matrix B2_star;  // p1 x r1
  Matrix Q2_star;  // p2 x r2
  int r1_hat = 0;
  int r2_hat = 0;
  int k1_hat = 0;
  int k2_hat = 0;
  MatrixSeries X_hat;  // T observations, r1 x r2
  int n_iterations = 0;
  bool converged = false;

  /// Entrywise time mean removed before fitting (zero when centering is off).
  Matrix center;

  // First-stage diagnostics.
  int r1_initial = 0;
  int r2_initial = 0;
  Matrix A1_first;  // leading r1_initial eigenvectors of M1
  Matrix P1_first;  // leading r2_initial eigenvectors of M2
  Vector m1_values;
  Vector m2_values;
  int r1_wlc = 0;
  int r2_wlc = 0;
  Vector s1_values;
  Vector s2_values;
  std::optional<WhitenessReport> initial_report;
  std::optional<WhitenessReport> final_report;
  std::vector<std::pair<double, double>> iteration_steps;
  std::vector<std::string> warnings;

  /// A1 X_t P1' + center.
  Matrix fitted(Eigen::Index t) const;
};

/// The full pipeline: first-stage moments and orders, projection iterations,
/// order re-estimation, two-way projected PCA and factor recovery.
FactorFit fit(const MatrixSeries& y, const EstimationConfig& cfg, const FitOptions& options = {});

}  // namespace matfactor
