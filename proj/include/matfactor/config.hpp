#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace matfactor {

enum class TestMethod { LjungBox, TsayRank, CyzMax, Auto };

std::string_view to_string(TestMethod method) noexcept;
/// Accepts "ljung-box", "tsay-rank", "cyz-max", "auto" (case-sensitive).
TestMethod parse_test_method(std::string_view name);

/// How the column back-test of the diagonal-path search stops.
enum class ColumnRule {
  /// Stop at the first non-rejected block, mirroring the row back-test.
  FirstAccept,
  /// Stop at the first rejected block.
  FirstReject,
};

std::string_view to_string(ColumnRule rule) noexcept;
ColumnRule parse_column_rule(std::string_view name);

/// Where the back-loading initializer of the projection iterations comes from.
enum class InitMode {
  /// Leading eigenvectors of the first-stage M2 estimate.
  FirstStage,
  /// A seeded random orthonormal matrix.
  Random,
};

struct EstimationConfig {
  int k0 = 2;            // lag budget of the moment matrices
  double eta = 1e-4;     // convergence threshold on subspace distances
  int s0 = 2;            // maximum number of refinement passes
  double alpha = 0.05;   // test level
  int m = 10;            // lags in the white-noise tests
  double epsilon = 0.9;  // submatrix fraction when a block has d >= T
  TestMethod test = TestMethod::Auto;
  /// Cap on the eigenvalue-ratio search; nullopt selects the per-use default.
  std::optional<int> ratio_cap;
  int n_boot = 500;
  ColumnRule column_rule = ColumnRule::FirstAccept;
  /// PCA-rotate blocks before the rank test inside the order search. Off by
  /// default: the rotation isolates near-null noise directions in which small
  /// loading-estimation errors look like serial dependence.
  bool rank_pca = false;
  InitMode init = InitMode::FirstStage;
  std::uint64_t seed = 20240101;
  /// Replace a zero order estimate by 1 (with a warning) instead of failing.
  bool order_fallback = true;
  /// Demean each panel entry over time before fitting.
  bool center = true;

  void validate() const;
};

}  // namespace matfactor
