#pragma once

#include "matfactor/config.hpp"
#include "matfactor/linalg.hpp"
#include "matfactor/series.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace matfactor {

/// Vector time series stored T x d, one observation per row.
using VectorSeries = Matrix;

struct TestOutcome {
  double statistic = 0.0;
  /// Rejection threshold: chi-square quantile (Ljung-Box), Gumbel critical
  /// value (rank test) or bootstrap quantile (max-correlation test).
  double threshold = 0.0;
  /// Only Ljung-Box and the bootstrap test produce one; NaN otherwise.
  double p_value = 0.0;
  bool reject = false;
  TestMethod method = TestMethod::LjungBox;
  int d = 0;
  int m = 0;
  /// Lags actually scanned; below m only when an early exit was requested.
  int lags_evaluated = 0;
};

/// Multivariate portmanteau Q = T^2 sum_k tr(G_k' G_0^{-1} G_k G_0^{-1}) / (T - k),
/// compared with the chi-square(d^2 m) upper alpha quantile.
TestOutcome ljung_box(const VectorSeries& x, int m, double alpha = 0.05);

/// b_N + a_N * g_{1-alpha} with a_N = (2 ln N)^{-1/2},
/// b_N = (2 ln N)^{1/2} - (ln(pi) + ln ln N) / (2 (2 ln N)^{1/2}),
/// g_{1-alpha} = -ln(-ln(1 - alpha)).
double gumbel_critical_value(double n_entries, double alpha);

/// Maximum scaled rank autocorrelation. Components are PCA-orthogonalized
/// first when orthogonalize is set and d < T. With early_exit the scan stops
/// at the first lag whose maximum exceeds the critical value; the reported
/// statistic is then the maximum so far.
TestOutcome tsay_rank_test(const VectorSeries& x, int m, double alpha, bool early_exit = false,
                           bool orthogonalize = true);

/// Maximum scaled auto/cross-correlation with a block Gaussian-multiplier
/// bootstrap threshold (block length ceil(T^{1/3})).
TestOutcome cyz_max_test(const VectorSeries& x, int m, double alpha, int n_boot,
                         std::uint64_t seed);

/// Auto resolves to Ljung-Box when p1*p2 <= 36 and T >= 4*p1*p2, else the rank test.
/// Inside the order search an automatic Ljung-Box choice falls back to the rank
/// test on blocks whose lag-0 covariance is singular.
TestMethod resolve_test(TestMethod requested, Eigen::Index p1, Eigen::Index p2, Eigen::Index T);

enum class PathStage { Diagonal, Escalation, RowBacktest, ColumnBacktest };

struct PathStep {
  PathStage stage = PathStage::Diagonal;
  /// 1-based start row/column of the lower-right block N_t(i, j).
  int row_start = 1;
  int col_start = 1;
  /// Shape of the block that was vectorized (after any top-left reduction).
  int block_rows = 0;
  int block_cols = 0;
  /// The block is numerically zero and was accepted without a test.
  bool null_block = false;
  TestOutcome outcome;
};

struct WhitenessReport {
  std::vector<PathStep> trace;
  int r1_hat = 0;
  int r2_hat = 0;
  std::optional<int> l_star;
  std::optional<int> i_star;
  std::optional<int> j_star;
  TestMethod method = TestMethod::TsayRank;
  /// Every test along a search direction rejected; the order is a boundary value.
  bool exhausted = false;
  /// The first diagonal block was already white.
  bool order_zero = false;
};

/// Diagonal-path order search on N_t = Gamma1' Y_t Gamma2.
WhitenessReport diagonal_path_order(const MatrixSeries& y, const Matrix& gamma1,
                                    const Matrix& gamma2, const EstimationConfig& cfg);

std::string_view to_string(PathStage stage) noexcept;

}  // namespace matfactor
