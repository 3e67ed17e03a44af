#pragma once

#include "matfactor/config.hpp"
#include "matfactor/dgp.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace matfactor {

struct BenchmarkScenario {
  std::string name;
  SimScenario scenario;
};

struct BenchmarkOptions {
  int n_replications = 100;
  std::uint64_t seed = 1234;
  /// Keep the loadings drawn from scenario.seed for every replication and
  /// only redraw the time paths. When false every replication redraws all.
  bool fixed_loadings = true;
  /// Also run the estimator that stops after the first projection pass.
  bool with_baseline = true;
  /// Compute the factor-recovery distance (costs one SVD per period).
  bool with_factor_distance = true;
  /// Compute the distance metrics (MD_*, DX*) from fits given the true
  /// (r1, r2, k1, k2), so that they measure estimation accuracy alone. The
  /// hit rates always come from the fully data-driven fit.
  bool accuracy_at_true_orders = true;
  /// Worker threads; 0 means MATFACTOR_THREADS or hardware concurrency.
  unsigned threads = 0;
  /// Estimation settings. Simulated panels have zero mean, so centering is
  /// switched off unless the caller turns it back on.
  EstimationConfig cfg = [] {
    EstimationConfig c;
    c.center = false;
    return c;
  }();
};

struct ReplicationResult {
  int scenario = 0;
  int replication = 0;
  bool ok = false;
  std::string error;

  int r1_hat = 0, r2_hat = 0;          // final orders
  int r1_initial = 0, r2_initial = 0;  // first-stage orders
  int r1_wlc = 0, r2_wlc = 0;          // eigenvalue-ratio orders
  int k1_hat = 0, k2_hat = 0;

  double md_A = 0.0;        // D(A1_hat, L1)
  double md_P = 0.0;        // D(P1_hat, R1)
  double md_A_first = 0.0;  // D(first-stage A1, L1)
  double md_P_first = 0.0;
  double md_A_s0 = 0.0;     // D(A1, L1) when no refinement pass runs
  double md_P_s0 = 0.0;
  double dx = 0.0;          // factor-recovery distance
  double dx_s0 = 0.0;
};

/// Replication seed: a deterministic function of (seed, scenario, replication).
std::uint64_t replication_seed(std::uint64_t seed, int scenario, int replication);

/// Runs every scenario n_replications times across a worker pool. Results are
/// ordered by (scenario, replication) whatever the scheduling.
std::vector<ReplicationResult> run_benchmark(const std::vector<BenchmarkScenario>& grid,
                                             const BenchmarkOptions& options);

struct MetricSummary {
  std::string scenario;
  int T = 0;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
};

/// Metrics: hit_rate, hit_rate_initial, hit_rate_wlc, MD_A, MD_P, MD_A_first,
/// MD_P_first, MD_A_s0, MD_P_s0, DX, DX_s0, failures. Failed replications count
/// as misses in hit rates and are excluded from the distance metrics.
std::vector<MetricSummary> summarize(const std::vector<BenchmarkScenario>& grid,
                                     const std::vector<ReplicationResult>& results,
                                     const BenchmarkOptions& options);

/// CSV header `scenario,T,metric,mean,sd`.
void write_benchmark_csv(std::ostream& out, const std::vector<MetricSummary>& rows);

/// Worker count from MATFACTOR_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

}  // namespace matfactor
