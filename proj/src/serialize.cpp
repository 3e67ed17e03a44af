#include "matfactor/serialize.hpp"

#include "matfactor/error.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace matfactor {

namespace {

// JSON has no NaN; absent p-values are written as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* what) {
  require(j.is_object(), ErrorKind::InvalidInput, std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    require(known.count(key) > 0, ErrorKind::InvalidInput,
            std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_if(const Json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("invalid value for '") + key + "': " + e.what());
  }
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_array(), ErrorKind::InvalidInput, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            ErrorKind::InvalidInput, "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Json series_to_json(const MatrixSeries& s) {
  Json out = Json::array();
  for (Eigen::Index t = 0; t < s.length(); ++t) out.push_back(matrix_to_json(s.at(t)));
  return out;
}

MatrixSeries series_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::InvalidInput,
          "series must be a non-empty array of matrices");
  const Matrix first = matrix_from_json(j.front());
  MatrixSeries s(first.rows(), first.cols(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t t = 0; t < j.size(); ++t) s.set(static_cast<Eigen::Index>(t), matrix_from_json(j[t]));
  return s;
}

Json scenario_to_json(const SimScenario& s) {
  return Json{{"p1", s.p1},         {"p2", s.p2},         {"r1", s.r1}, {"r2", s.r2},
              {"k1", s.k1},         {"k2", s.k2},         {"delta1", s.delta1},
              {"delta2", s.delta2}, {"T", s.T},           {"burn_in", s.burn_in},
              {"seed", s.seed}};
}

SimScenario scenario_from_json(const Json& j) {
  reject_unknown(j, {"p1", "p2", "r1", "r2", "k1", "k2", "delta1", "delta2", "T", "burn_in", "seed"},
                 "scenario");
  SimScenario s;
  read_if(j, "p1", s.p1);
  read_if(j, "p2", s.p2);
  read_if(j, "r1", s.r1);
  read_if(j, "r2", s.r2);
  read_if(j, "k1", s.k1);
  read_if(j, "k2", s.k2);
  read_if(j, "delta1", s.delta1);
  read_if(j, "delta2", s.delta2);
  read_if(j, "T", s.T);
  read_if(j, "burn_in", s.burn_in);
  read_if(j, "seed", s.seed);
  s.validate();
  return s;
}

Json config_to_json(const EstimationConfig& cfg) {
  Json j{{"k0", cfg.k0},
         {"eta", cfg.eta},
         {"s0", cfg.s0},
         {"alpha", cfg.alpha},
         {"m", cfg.m},
         {"epsilon", cfg.epsilon},
         {"test", std::string(to_string(cfg.test))},
         {"ratio_cap", cfg.ratio_cap ? Json(*cfg.ratio_cap) : Json(nullptr)},
         {"n_boot", cfg.n_boot},
         {"column_rule", std::string(to_string(cfg.column_rule))},
         {"rank_pca", cfg.rank_pca},
         {"init", cfg.init == InitMode::FirstStage ? "first-stage" : "random"},
         {"seed", cfg.seed},
         {"order_fallback", cfg.order_fallback},
         {"center", cfg.center}};
  return j;
}

EstimationConfig config_from_json(const Json& j, EstimationConfig cfg) {
  reject_unknown(j, {"k0", "eta", "s0", "alpha", "m", "epsilon", "test", "ratio_cap", "n_boot",
                     "column_rule", "rank_pca", "init", "seed", "order_fallback", "center"},
                 "config");
  read_if(j, "k0", cfg.k0);
  read_if(j, "eta", cfg.eta);
  read_if(j, "s0", cfg.s0);
  read_if(j, "alpha", cfg.alpha);
  read_if(j, "m", cfg.m);
  read_if(j, "epsilon", cfg.epsilon);
  read_if(j, "n_boot", cfg.n_boot);
  read_if(j, "seed", cfg.seed);
  read_if(j, "order_fallback", cfg.order_fallback);
  read_if(j, "center", cfg.center);
  read_if(j, "rank_pca", cfg.rank_pca);
  if (j.contains("test")) cfg.test = parse_test_method(j.at("test").get<std::string>());
  if (j.contains("column_rule"))
    cfg.column_rule = parse_column_rule(j.at("column_rule").get<std::string>());
  if (j.contains("ratio_cap")) {
    if (j.at("ratio_cap").is_null()) {
      cfg.ratio_cap.reset();
    } else {
      int cap = 0;
      read_if(j, "ratio_cap", cap);
      cfg.ratio_cap = cap;
    }
  }
  if (j.contains("init")) {
    const auto name = j.at("init").get<std::string>();
    if (name == "first-stage") {
      cfg.init = InitMode::FirstStage;
    } else if (name == "random") {
      cfg.init = InitMode::Random;
    } else {
      fail(ErrorKind::InvalidInput, "config: init must be 'first-stage' or 'random'");
    }
  }
  cfg.validate();
  return cfg;
}

Json outcome_to_json(const TestOutcome& o) {
  return Json{{"method", std::string(to_string(o.method))},
              {"statistic", number_or_null(o.statistic)},
              {"threshold", number_or_null(o.threshold)},
              {"p_value", number_or_null(o.p_value)},
              {"reject", o.reject},
              {"d", o.d},
              {"m", o.m},
              {"lags_evaluated", o.lags_evaluated}};
}

Json report_to_json(const WhitenessReport& r) {
  Json trace = Json::array();
  for (const PathStep& s : r.trace) {
    trace.push_back(Json{{"stage", std::string(to_string(s.stage))},
                         {"row_start", s.row_start},
                         {"col_start", s.col_start},
                         {"block_rows", s.block_rows},
                         {"block_cols", s.block_cols},
                         {"null_block", s.null_block},
                         {"outcome", outcome_to_json(s.outcome)}});
  }
  auto opt = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"r1_hat", r.r1_hat},
              {"r2_hat", r.r2_hat},
              {"l_star", opt(r.l_star)},
              {"i_star", opt(r.i_star)},
              {"j_star", opt(r.j_star)},
              {"method", std::string(to_string(r.method))},
              {"exhausted", r.exhausted},
              {"order_zero", r.order_zero},
              {"trace", std::move(trace)}};
}

Json fit_to_json(const FactorFit& fit) {
  Json steps = Json::array();
  for (const auto& [da, dp] : fit.iteration_steps) steps.push_back(Json{{"front", da}, {"back", dp}});
  auto vec = [](const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  Json j{{"orders", Json{{"r1", fit.r1_hat}, {"r2", fit.r2_hat}, {"k1", fit.k1_hat}, {"k2", fit.k2_hat}}},
         {"initial_orders", Json{{"r1", fit.r1_initial}, {"r2", fit.r2_initial}}},
         {"ratio_orders", Json{{"r1", fit.r1_wlc}, {"r2", fit.r2_wlc}}},
         {"iterations", Json{{"n_iterations", fit.n_iterations},
                             {"converged", fit.converged},
                             {"steps", std::move(steps)}}},
         {"loadings", Json{{"A1", matrix_to_json(fit.A1_hat)},
                           {"P1", matrix_to_json(fit.P1_hat)},
                           {"B1", matrix_to_json(fit.B1_hat)},
                           {"Q1", matrix_to_json(fit.Q1_hat)},
                           {"B2_star", matrix_to_json(fit.B2_star)},
                           {"Q2_star", matrix_to_json(fit.Q2_star)}}},
         {"center", matrix_to_json(fit.center)},
         {"eigenvalues", Json{{"M1", vec(fit.m1_values)},
                              {"M2", vec(fit.m2_values)},
                              {"S1", vec(fit.s1_values)},
                              {"S2", vec(fit.s2_values)}}},
         {"warnings", fit.warnings},
         {"factors", series_to_json(fit.X_hat)}};
  if (fit.initial_report) j["initial_report"] = report_to_json(*fit.initial_report);
  if (fit.final_report) j["final_report"] = report_to_json(*fit.final_report);
  return j;
}

FactorFit fit_from_json(const Json& j) {
  FactorFit fit;
  try {
    const Json& orders = j.at("orders");
    fit.r1_hat = orders.at("r1").get<int>();
    fit.r2_hat = orders.at("r2").get<int>();
    fit.k1_hat = orders.at("k1").get<int>();
    fit.k2_hat = orders.at("k2").get<int>();
    const Json& load = j.at("loadings");
    fit.A1_hat = matrix_from_json(load.at("A1"));
    fit.P1_hat = matrix_from_json(load.at("P1"));
    fit.B1_hat = matrix_from_json(load.at("B1"));
    fit.Q1_hat = matrix_from_json(load.at("Q1"));
    fit.B2_star = matrix_from_json(load.at("B2_star"));
    fit.Q2_star = matrix_from_json(load.at("Q2_star"));
    fit.center = matrix_from_json(j.at("center"));
    fit.X_hat = series_from_json(j.at("factors"));
    if (j.contains("iterations")) {
      fit.n_iterations = j["iterations"].value("n_iterations", 0);
      fit.converged = j["iterations"].value("converged", false);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed fit document: ") + e.what());
  }
  require(fit.A1_hat.cols() == fit.r1_hat && fit.P1_hat.cols() == fit.r2_hat &&
              fit.X_hat.rows() == fit.r1_hat && fit.X_hat.cols() == fit.r2_hat,
          ErrorKind::InvalidInput, "fit document: orders and shapes disagree");
  return fit;
}

Json truth_to_json(const GroundTruth& g) {
  return Json{{"L1", matrix_to_json(g.L1)},   {"R1", matrix_to_json(g.R1)},
              {"L2", matrix_to_json(g.L2)},   {"R2", matrix_to_json(g.R2)},
              {"Phi", matrix_to_json(g.Phi)}, {"Psi", matrix_to_json(g.Psi)},
              {"F", series_to_json(g.F)}};
}

}  // namespace matfactor
