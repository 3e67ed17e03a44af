#include "matfactor/benchmark.hpp"

#include "matfactor/error.hpp"
#include "matfactor/estimate.hpp"
#include "matfactor/io.hpp"
#include "matfactor/rng.hpp"
#include "matfactor/subspace.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

namespace matfactor {

unsigned default_thread_count() {
  if (const char* env = std::getenv("MATFACTOR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t replication_seed(std::uint64_t seed, int scenario, int replication) {
  const std::uint64_t id = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(scenario)) << 32) |
                           static_cast<std::uint32_t>(replication);
  return Rng(seed, id).next_u64();
}

namespace {

double factor_distance(const FactorFit& f, const GroundTruth& truth) {
  const MatrixSeries signal = truth.signal();
  const Eigen::Index T = signal.length();
  double total = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Matrix diff = f.fitted(t) - Matrix(signal.at(t));
    total += Eigen::JacobiSVD<Matrix>(diff).singularValues()(0);
  }
  return total / (static_cast<double>(T) * std::sqrt(static_cast<double>(signal.rows() * signal.cols())));
}

ReplicationResult run_one(const BenchmarkScenario& spec, int scenario, int replication,
                          const BenchmarkOptions& options) {
  ReplicationResult r;
  r.scenario = scenario;
  r.replication = replication;
  try {
    const std::uint64_t seed = replication_seed(options.seed, scenario, replication);
    SimScenario sc = spec.scenario;
    PanelOptions panel_options;
    if (options.fixed_loadings) {
      panel_options.path_seed = seed;
    } else {
      sc.seed = seed;
    }
    const SimulatedPanel panel = simulate_panel(sc, panel_options);
    const GroundTruth& truth = panel.truth;

    FitOptions fit_options;
    fit_options.initial_back = truth.R1;
    const FactorFit f = fit(panel.Y, options.cfg, fit_options);
    r.r1_hat = f.r1_hat;
    r.r2_hat = f.r2_hat;
    r.r1_initial = f.r1_initial;
    r.r2_initial = f.r2_initial;
    r.r1_wlc = f.r1_wlc;
    r.r2_wlc = f.r2_wlc;
    r.k1_hat = f.k1_hat;
    r.k2_hat = f.k2_hat;
    FitOptions accuracy_options = fit_options;
    if (options.accuracy_at_true_orders) {
      accuracy_options.fixed_orders = std::make_pair(sc.r1, sc.r2);
      accuracy_options.fixed_noise_orders = std::make_pair(sc.k1, sc.k2);
    }
    const FactorFit a =
        options.accuracy_at_true_orders ? fit(panel.Y, options.cfg, accuracy_options) : f;
    r.md_A = projection_distance(a.A1_hat, truth.L1);
    r.md_P = projection_distance(a.P1_hat, truth.R1);
    r.md_A_first = projection_distance(a.A1_first, truth.L1);
    r.md_P_first = projection_distance(a.P1_first, truth.R1);
    if (options.with_factor_distance) r.dx = factor_distance(a, truth);

    if (options.with_baseline) {
      // Single pass from the default first-stage initializer.
      EstimationConfig base_cfg = options.cfg;
      base_cfg.s0 = 0;
      FitOptions base_options = accuracy_options;
      base_options.initial_back.reset();
      const FactorFit b = fit(panel.Y, base_cfg, base_options);
      r.md_A_s0 = projection_distance(b.A1_hat, truth.L1);
      r.md_P_s0 = projection_distance(b.P1_hat, truth.R1);
      if (options.with_factor_distance) r.dx_s0 = factor_distance(b, truth);
    }
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return r;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  int n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return n > 0 ? sum / n : std::nan(""); }
  double sd() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
  }
};

}  // namespace

std::vector<ReplicationResult> run_benchmark(const std::vector<BenchmarkScenario>& grid,
                                             const BenchmarkOptions& options) {
  require(options.n_replications >= 0, ErrorKind::InvalidInput,
          "benchmark: n_replications must be non-negative");
  options.cfg.validate();
  for (const auto& s : grid) s.scenario.validate();

  const std::size_t per = static_cast<std::size_t>(options.n_replications);
  const std::size_t total = grid.size() * per;
  std::vector<ReplicationResult> results(total);
  if (total == 0) return results;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const int scenario = static_cast<int>(task / per);
      const int replication = static_cast<int>(task % per);
      results[task] = run_one(grid[static_cast<std::size_t>(scenario)], scenario, replication, options);
    }
  };
  const unsigned threads = std::min<std::size_t>(
      options.threads > 0 ? options.threads : default_thread_count(), total);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::vector<MetricSummary> summarize(const std::vector<BenchmarkScenario>& grid,
                                     const std::vector<ReplicationResult>& results,
                                     const BenchmarkOptions& options) {
  struct Metric {
    const char* name;
    bool hit;  // indicator over all replications, failures count as 0
    bool needs_baseline;
    bool needs_dx;
    std::function<double(const ReplicationResult&, const SimScenario&)> value;
  };
  const std::vector<Metric> metrics = {
      {"hit_rate", true, false, false,
       [](const ReplicationResult& r, const SimScenario& s) {
         return double(r.r1_hat == s.r1 && r.r2_hat == s.r2);
       }},
      {"hit_rate_initial", true, false, false,
       [](const ReplicationResult& r, const SimScenario& s) {
         return double(r.r1_initial == s.r1 && r.r2_initial == s.r2);
       }},
      {"hit_rate_wlc", true, false, false,
       [](const ReplicationResult& r, const SimScenario& s) {
         return double(r.r1_wlc == s.r1 && r.r2_wlc == s.r2);
       }},
      {"MD_A", false, false, false, [](const ReplicationResult& r, const SimScenario&) { return r.md_A; }},
      {"MD_P", false, false, false, [](const ReplicationResult& r, const SimScenario&) { return r.md_P; }},
      {"MD_A_first", false, false, false,
       [](const ReplicationResult& r, const SimScenario&) { return r.md_A_first; }},
      {"MD_P_first", false, false, false,
       [](const ReplicationResult& r, const SimScenario&) { return r.md_P_first; }},
      {"MD_A_s0", false, true, false, [](const ReplicationResult& r, const SimScenario&) { return r.md_A_s0; }},
      {"MD_P_s0", false, true, false, [](const ReplicationResult& r, const SimScenario&) { return r.md_P_s0; }},
      {"DX", false, false, true, [](const ReplicationResult& r, const SimScenario&) { return r.dx; }},
      {"DX_s0", false, true, true, [](const ReplicationResult& r, const SimScenario&) { return r.dx_s0; }},
      {"failures", true, false, false,
       [](const ReplicationResult& r, const SimScenario&) { return double(!r.ok); }},
  };

  std::vector<MetricSummary> rows;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const SimScenario& sc = grid[s].scenario;
    bool any = false;
    for (const auto& r : results) any = any || r.scenario == static_cast<int>(s);
    if (!any) continue;
    for (const Metric& m : metrics) {
      if (m.needs_baseline && !options.with_baseline) continue;
      if (m.needs_dx && !options.with_factor_distance) continue;
      Moments acc;
      for (const auto& r : results) {
        if (r.scenario != static_cast<int>(s)) continue;
        if (m.hit) {
          const bool failure_metric = std::string_view(m.name) == "failures";
          acc.add(r.ok || failure_metric ? m.value(r, sc) : 0.0);
        } else if (r.ok) {
          acc.add(m.value(r, sc));
        }
      }
      rows.push_back({grid[s].name, sc.T, m.name, acc.mean(), acc.sd()});
    }
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<MetricSummary>& rows) {
  out << "scenario,T,metric,mean,sd\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.T << ',' << r.metric << ',' << format_double(r.mean) << ','
        << format_double(r.sd) << '\n';
}

}  // namespace matfactor
