// Command-line front end: simulate | fit | order | factors | forecast | benchmark.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Failures print a one-line JSON object on stderr.

#include "matfactor/benchmark.hpp"
#include "matfactor/config.hpp"
#include "matfactor/dgp.hpp"
#include "matfactor/error.hpp"
#include "matfactor/estimate.hpp"
#include "matfactor/forecast.hpp"
#include "matfactor/io.hpp"
#include "matfactor/serialize.hpp"
#include "matfactor/subspace.hpp"
#include "matfactor/wntest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mf = matfactor;

namespace {

/// A usage problem detected after CLI parsing (bad config file, bad value).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(mf::ErrorKind kind) {
  switch (kind) {
    case mf::ErrorKind::InvalidInput:
    case mf::ErrorKind::InsufficientData:
    case mf::ErrorKind::DuplicateEntry:
    case mf::ErrorKind::ParseError:
    case mf::ErrorKind::AllMissing:
    case mf::ErrorKind::Io:
      return 2;
    default:
      return 3;
  }
}

int report(const std::string& kind, const std::string& message, int code) {
  mf::Json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

mf::Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mf::Error(mf::ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return mf::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw mf::Error(mf::ErrorKind::ParseError, "'" + path + "': " + e.what());
  }
}

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mf::Error(mf::ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw mf::Error(mf::ErrorKind::Io, "write failed for '" + path + "'");
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> test;
  std::optional<int> k0;
  std::optional<int> m;
  std::optional<int> s0;
  std::optional<double> alpha;
  bool no_center = false;
  bool rank_pca = false;

  mf::EstimationConfig config(mf::EstimationConfig base = {}) const {
    try {
      if (!config_path.empty()) base = mf::config_from_json(load_json(config_path), base);
      if (seed) base.seed = *seed;
      if (test) base.test = mf::parse_test_method(*test);
      if (k0) base.k0 = *k0;
      if (m) base.m = *m;
      if (s0) base.s0 = *s0;
      if (alpha) base.alpha = *alpha;
      if (no_center) base.center = false;
      if (rank_pca) base.rank_pca = true;
      base.validate();
    } catch (const mf::Error& e) {
      if (e.kind() == mf::ErrorKind::Io || e.kind() == mf::ErrorKind::ParseError) throw;
      throw UsageError(std::string("configuration: ") + e.what());
    }
    return base;
  }
};

void add_estimation_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--test", c.test, "White-noise test: ljung-box, tsay-rank, cyz-max, auto");
  cmd->add_option("--k0", c.k0, "Lag budget of the moment matrices");
  cmd->add_option("--m", c.m, "Lags in the white-noise tests");
  cmd->add_option("--s0", c.s0, "Maximum refinement passes");
  cmd->add_option("--alpha", c.alpha, "Test level");
  cmd->add_flag("--no-center", c.no_center, "Do not demean the panel before fitting");
  cmd->add_flag("--rank-pca", c.rank_pca, "PCA-rotate blocks before the rank test");
}

std::vector<mf::BenchmarkScenario> parse_grid(const mf::Json& doc) {
  const mf::Json* list = &doc;
  if (doc.is_object() && doc.contains("scenarios")) list = &doc.at("scenarios");
  if (doc.is_object() && !doc.contains("scenarios")) {
    static mf::Json single;
    single = mf::Json::array({doc});
    list = &single;
  }
  if (!list->is_array()) throw UsageError("benchmark grid must be a JSON array of scenarios");
  std::vector<mf::BenchmarkScenario> grid;
  for (const auto& item : *list) {
    mf::BenchmarkScenario s;
    mf::Json body = item;
    if (item.contains("scenario")) body = item.at("scenario");
    else body.erase("name");
    try {
      s.scenario = mf::scenario_from_json(body);
    } catch (const mf::Error& e) {
      throw UsageError(e.what());
    }
    if (item.contains("name")) {
      s.name = item.at("name").get<std::string>();
    } else {
      std::ostringstream name;
      name << "d" << s.scenario.delta1 << "_" << s.scenario.delta2 << "_p" << s.scenario.p1 << "x"
           << s.scenario.p2;
      s.name = name.str();
    }
    for (char& ch : s.name)
      if (ch == ',' || ch == '\n' || ch == '"') ch = '_';
    grid.push_back(std::move(s));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-variate factor model estimation and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "JSON file with estimation overrides")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Seed for every random choice of the command");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw a panel from a simulation scenario");
  std::string sim_scenario, sim_out, sim_truth;
  sim->add_option("--scenario", sim_scenario, "Scenario JSON (SimScenario fields)")->required();
  sim->add_option("--out", sim_out, "Panel CSV output (default stdout)");
  sim->add_option("--truth", sim_truth, "Ground-truth JSON output");

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit the factor model to a panel CSV");
  std::string fit_panel, fit_out;
  fitc->add_option("--panel", fit_panel, "Panel CSV")->required();
  fitc->add_option("--out", fit_out, "Fit JSON output (default stdout)");
  add_estimation_flags(fitc, common);

  // order
  auto* ord = app.add_subcommand("order", "Diagonal-path order search");
  std::string ord_panel, ord_out, ord_stage = "initial";
  bool ord_trace = false;
  ord->add_option("--panel", ord_panel, "Panel CSV")->required();
  ord->add_option("--out", ord_out, "Report JSON output (default stdout)");
  ord->add_option("--stage", ord_stage,
                  "initial: search on the moment-matrix eigenbases; final: after the projection "
                  "iterations")
      ->check(CLI::IsMember({"initial", "final"}));
  ord->add_flag("--trace", ord_trace, "Include every test of the search");
  add_estimation_flags(ord, common);

  // factors
  auto* fac = app.add_subcommand("factors", "Export the factor series of a fit");
  std::string fac_fit, fac_out;
  fac->add_option("--fit", fac_fit, "Fit JSON")->required();
  fac->add_option("--out", fac_out, "Factor CSV output (default stdout)");

  // forecast
  auto* fc = app.add_subcommand("forecast", "Expanding-window forecast evaluation");
  std::string fc_panel, fc_out, fc_method = "proposed";
  std::vector<int> fc_horizons{1};
  int fc_windows = 120;
  std::optional<long> fc_first;
  bool fc_freeze = false;
  fc->add_option("--panel", fc_panel, "Panel CSV")->required();
  fc->add_option("--out", fc_out, "Evaluation CSV output (default stdout)");
  fc->add_option("--horizons", fc_horizons, "Forecast horizons")->delimiter(',');
  fc->add_option("--windows", fc_windows, "Number of trailing forecast origins");
  fc->add_option("--first-origin", fc_first, "First 1-based origin (overrides --windows)");
  fc->add_option("--method", fc_method, "proposed, initial or both")
      ->check(CLI::IsMember({"proposed", "initial", "both"}));
  fc->add_flag("--freeze-orders", fc_freeze, "Select orders at the first origin only");
  add_estimation_flags(fc, common);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Monte-Carlo benchmark over a scenario grid");
  std::string bench_grid, bench_out;
  int bench_reps = 100;
  unsigned bench_threads = 0;
  bool bench_redraw = false, bench_no_baseline = false, bench_no_dx = false;
  bool bench_estimated = false;
  bench->add_option("--grid", bench_grid, "Scenario grid JSON")->required();
  bench->add_option("--replications", bench_reps, "Replications per scenario")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--threads", bench_threads, "Worker threads (default MATFACTOR_THREADS)");
  bench->add_flag("--redraw-loadings", bench_redraw, "Redraw the loadings in every replication");
  bench->add_flag("--no-baseline", bench_no_baseline, "Skip the single-pass baseline estimator");
  bench->add_flag("--no-factor-distance", bench_no_dx, "Skip the factor-recovery metric");
  bench->add_flag("--accuracy-at-estimated-orders", bench_estimated,
                  "Compute distance metrics from the data-driven fit instead of true orders");
  bench->add_option("--out", bench_out, "Summary CSV output (default stdout)");
  add_estimation_flags(bench, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("Usage", e.what(), 1);
  }

  try {
    if (*sim) {
      mf::SimScenario sc;
      try {
        sc = mf::scenario_from_json(load_json(sim_scenario));
      } catch (const mf::Error& e) {
        if (e.kind() == mf::ErrorKind::InvalidInput) throw UsageError(e.what());
        throw;
      }
      if (common.seed) sc.seed = *common.seed;
      const mf::SimulatedPanel panel = mf::simulate_panel(sc);
      std::ostringstream csv;
      mf::write_panel(csv, panel.Y);
      emit(sim_out, csv.str());
      if (!sim_truth.empty()) {
        mf::Json truth{{"scenario", mf::scenario_to_json(sc)},
                       {"rng", mf::Rng::kAlgorithm},
                       {"truth", mf::truth_to_json(panel.truth)}};
        emit(sim_truth, truth.dump(2) + "\n");
      }
    } else if (*fitc) {
      const mf::EstimationConfig cfg = common.config();
      const mf::PanelRead panel = mf::read_panel(fit_panel);
      const mf::FactorFit f = mf::fit(panel.series, cfg);
      mf::Json doc = mf::fit_to_json(f);
      doc["imputed"] = panel.imputed;
      doc["config"] = mf::config_to_json(cfg);
      emit(fit_out, doc.dump(2) + "\n");
    } else if (*ord) {
      const mf::EstimationConfig cfg = common.config();
      const mf::PanelRead panel = mf::read_panel(ord_panel);
      mf::WhitenessReport rep;
      if (ord_stage == "initial") {
        const mf::MatrixSeries y = cfg.center ? panel.series.centered() : panel.series;
        const mf::Matrix g1 = mf::sym_eigen(mf::build_m1(y, cfg.k0).matrix).vectors;
        const mf::Matrix g2 = mf::sym_eigen(mf::build_m2(y, cfg.k0).matrix).vectors;
        rep = mf::diagonal_path_order(y, g1, g2, cfg);
      } else {
        const mf::FactorFit f = mf::fit(panel.series, cfg);
        rep = *f.final_report;
      }
      mf::Json doc = mf::report_to_json(rep);
      if (!ord_trace) doc.erase("trace");
      doc["stage"] = ord_stage;
      doc["imputed"] = panel.imputed;
      emit(ord_out, doc.dump(2) + "\n");
    } else if (*fac) {
      const mf::FactorFit f = mf::fit_from_json(load_json(fac_fit));
      std::ostringstream csv;
      mf::write_factor_series(csv, f.X_hat);
      emit(fac_out, csv.str());
    } else if (*fc) {
      const mf::EstimationConfig cfg = common.config();
      const mf::PanelRead panel = mf::read_panel(fc_panel);
      const auto T = panel.series.length();
      mf::RollingWindow window;
      if (fc_first) {
        window.first_origin = *fc_first;
      } else {
        if (fc_windows < 1 || fc_windows >= T) throw UsageError("--windows must lie in [1, T)");
        window = mf::trailing_window(T, fc_windows);
      }
      std::vector<mf::ForecastMethod> methods;
      if (fc_method == "proposed" || fc_method == "both") methods.push_back(mf::ForecastMethod::Proposed);
      if (fc_method == "initial" || fc_method == "both") methods.push_back(mf::ForecastMethod::InitialOnly);
      std::ostringstream csv;
      csv << "method,h,FE_F,FE_2,n_windows\n";
      for (const auto method : methods) {
        mf::RollingOptions opts;
        opts.method = method;
        opts.freeze_orders = fc_freeze;
        for (const auto& ev : mf::rolling_evaluate(panel.series, cfg, fc_horizons, window, opts))
          csv << mf::to_string(method) << ',' << ev.h << ',' << mf::format_double(ev.fe_frobenius)
              << ',' << mf::format_double(ev.fe_spectral) << ',' << ev.n_windows << '\n';
      }
      emit(fc_out, csv.str());
    } else if (*bench) {
      mf::BenchmarkOptions opts;
      opts.cfg = common.config(opts.cfg);
      opts.n_replications = bench_reps;
      if (common.seed) opts.seed = *common.seed;
      opts.threads = bench_threads;
      opts.fixed_loadings = !bench_redraw;
      opts.with_baseline = !bench_no_baseline;
      opts.with_factor_distance = !bench_no_dx;
      opts.accuracy_at_true_orders = !bench_estimated;
      const auto grid = parse_grid(load_json(bench_grid));
      const auto results = mf::run_benchmark(grid, opts);
      std::ostringstream csv;
      mf::write_benchmark_csv(csv, mf::summarize(grid, results, opts));
      emit(bench_out, csv.str());
    }
  } catch (const UsageError& e) {
    return report("Usage", e.what(), 1);
  } catch (const mf::Error& e) {
    const int code = exit_code_for(e.kind());
    return report(std::string(mf::to_string(e.kind())), e.what(), code);
  } catch (const nlohmann::json::exception& e) {
    return report("InvalidInput", e.what(), 2);
  } catch (const std::exception& e) {
    return report("Internal", e.what(), 3);
  }
  return 0;
}
