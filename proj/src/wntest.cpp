#include "matfactor/wntest.hpp"

#include "matfactor/error.hpp"
#include "matfactor/rng.hpp"
#include "matfactor/subspace.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace matfactor {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix demeaned(const VectorSeries& x) {
  Matrix c = x;
  c.rowwise() -= x.colwise().mean();
  return c;
}

// Average ranks (1..T) of each column, ties sharing their mean rank.
Matrix column_ranks(const Matrix& x) {
  const Eigen::Index T = x.rows();
  Matrix ranks(T, x.cols());
  // (value, time) pairs sort contiguously, which is much faster than an
  // indirect comparator; ties are resolved afterwards anyway.
  std::vector<std::pair<double, Eigen::Index>> keyed(static_cast<std::size_t>(T));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index t = 0; t < T; ++t) keyed[static_cast<std::size_t>(t)] = {x(t, j), t};
    std::sort(keyed.begin(), keyed.end());
    Eigen::Index start = 0;
    while (start < T) {
      Eigen::Index stop = start + 1;
      while (stop < T && keyed[stop].first == keyed[start].first) ++stop;
      const double mean_rank = 0.5 * static_cast<double>(start + 1 + stop);
      for (Eigen::Index q = start; q < stop; ++q) ranks(keyed[q].second, j) = mean_rank;
      start = stop;
    }
  }
  return ranks;
}

}  // namespace

TestOutcome ljung_box(const VectorSeries& x, int m, double alpha) {
  const Eigen::Index T = x.rows();
  const Eigen::Index d = x.cols();
  require(d >= 1, ErrorKind::InvalidInput, "ljung_box: empty series");
  require(m >= 1 && T > m, ErrorKind::InsufficientData, "ljung_box: need T > m >= 1");
  require(x.allFinite(), ErrorKind::InvalidInput, "ljung_box: non-finite entries");

  const Matrix c = demeaned(x);
  const double Td = static_cast<double>(T);
  const Matrix gamma0 = c.transpose() * c / Td;
  Eigen::JacobiSVD<Matrix> svd(gamma0);
  const Vector& sv = svd.singularValues();
  require(sv(0) > 0.0 && sv(d - 1) > 1e-10 * sv(0), ErrorKind::SingularCovariance,
          "ljung_box: lag-0 covariance is singular (d = " + std::to_string(d) + ")");
  const Eigen::LDLT<Matrix> g0(gamma0);

  double q = 0.0;
  for (int k = 1; k <= m; ++k) {
    const Matrix gk = c.bottomRows(T - k).transpose() * c.topRows(T - k) / Td;
    // tr(Gk' G0^{-1} Gk G0^{-1})
    const Matrix left = g0.solve(gk);                        // G0^{-1} Gk
    const Matrix right = g0.solve(Matrix(gk.transpose()));  // G0^{-1} Gk'
    q += (left.cwiseProduct(right.transpose())).sum() / (Td - k);
  }
  q *= Td * Td;

  const double df = static_cast<double>(d * d) * m;
  const boost::math::chi_squared dist(df);
  TestOutcome out;
  out.statistic = q;
  out.threshold = boost::math::quantile(dist, 1.0 - alpha);
  out.p_value = q <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, q));
  out.reject = out.p_value < alpha;
  out.method = TestMethod::LjungBox;
  out.d = static_cast<int>(d);
  out.m = m;
  out.lags_evaluated = m;
  return out;
}

double gumbel_critical_value(double n_entries, double alpha) {
  require(n_entries > 1.0, ErrorKind::InvalidInput, "gumbel_critical_value: need N > 1");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidInput,
          "gumbel_critical_value: alpha in (0,1)");
  const double two_log_n = 2.0 * std::log(n_entries);
  const double root = std::sqrt(two_log_n);
  const double a_n = 1.0 / root;
  // The statistic is a maximum of absolute values, so the two-sided location
  // constant ln(pi) applies rather than the one-sided ln(4 pi).
  const double b_n =
      root - (std::log(std::numbers::pi) + std::log(std::log(n_entries))) / (2.0 * root);
  const double g = -std::log(-std::log(1.0 - alpha));
  return b_n + a_n * g;
}

TestOutcome tsay_rank_test(const VectorSeries& x, int m, double alpha, bool early_exit,
                           bool orthogonalize) {
  const Eigen::Index T = x.rows();
  require(x.cols() >= 1, ErrorKind::InvalidInput, "tsay_rank_test: empty series");
  require(m >= 1 && T > m + 2, ErrorKind::InsufficientData, "tsay_rank_test: need T > m + 2");
  require(x.allFinite(), ErrorKind::InvalidInput, "tsay_rank_test: non-finite entries");

  Matrix c = demeaned(x);
  const double Td = static_cast<double>(T);
  if (orthogonalize && c.cols() < T) {
    // Orthogonalize through principal components, dropping null directions.
    const Matrix cov = c.transpose() * c / Td;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Vector& lam = eig.eigenvalues();
    const double top = lam(lam.size() - 1);
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam(i) > 1e-12 * top) ++keep;
    require(top > 0.0 && keep > 0, ErrorKind::DegenerateComponent,
            "tsay_rank_test: series has zero variance");
    c = c * eig.eigenvectors().rightCols(keep);
  }

  Matrix u = column_ranks(c);
  u.array() -= 0.5 * (Td + 1.0);
  std::vector<Eigen::Index> live;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const double ss = u.col(j).squaredNorm();
    if (ss > 0.0) {
      u.col(j) /= std::sqrt(ss);
      live.push_back(j);
    }
  }
  require(!live.empty(), ErrorKind::DegenerateComponent, "tsay_rank_test: all components constant");
  if (static_cast<Eigen::Index>(live.size()) < u.cols()) u = u(Eigen::all, live).eval();

  const double d = static_cast<double>(u.cols());
  const double n_entries = d * d * m;
  TestOutcome out;
  out.method = TestMethod::TsayRank;
  out.d = static_cast<int>(u.cols());
  out.m = m;
  out.p_value = kNaN;
  out.threshold = gumbel_critical_value(std::max(n_entries, 2.0), alpha);

  // Single precision is ample for unit-norm rank columns and halves the cost
  // of the d x d x T products that dominate the order search.
  const Eigen::MatrixXf uf = u.cast<float>();
  const double root_t = std::sqrt(Td);
  double stat = 0.0;
  Eigen::MatrixXf rho(uf.cols(), uf.cols());
  for (int k = 1; k <= m; ++k) {
    rho.noalias() = uf.bottomRows(T - k).transpose() * uf.topRows(T - k);
    stat = std::max(stat, root_t * static_cast<double>(rho.cwiseAbs().maxCoeff()));
    out.lags_evaluated = k;
    if (early_exit && stat > out.threshold) break;
  }
  out.statistic = stat;
  out.reject = stat > out.threshold;
  return out;
}

TestOutcome cyz_max_test(const VectorSeries& x, int m, double alpha, int n_boot,
                         std::uint64_t seed) {
  const Eigen::Index T = x.rows();
  const Eigen::Index d = x.cols();
  require(d >= 1, ErrorKind::InvalidInput, "cyz_max_test: empty series");
  require(m >= 1 && T > m, ErrorKind::InsufficientData, "cyz_max_test: need T > m");
  require(n_boot >= 200, ErrorKind::InvalidInput, "cyz_max_test: n_boot must be >= 200");
  require(x.allFinite(), ErrorKind::InvalidInput, "cyz_max_test: non-finite entries");

  Matrix u = demeaned(x);
  const double Td = static_cast<double>(T);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double var = u.col(j).squaredNorm() / Td;
    require(var > 0.0, ErrorKind::DegenerateComponent,
            "cyz_max_test: component " + std::to_string(j) + " has zero variance");
    u.col(j) /= std::sqrt(var);
  }

  const double root_t = std::sqrt(Td);
  std::vector<Matrix> rho(static_cast<std::size_t>(m));
  double stat = 0.0;
  for (int k = 1; k <= m; ++k) {
    Matrix& r = rho[static_cast<std::size_t>(k - 1)];
    r.noalias() = u.bottomRows(T - k).transpose() * u.topRows(T - k) / Td;
    stat = std::max(stat, root_t * r.cwiseAbs().maxCoeff());
  }

  // Block multiplier bootstrap of T^{-1/2} sum_t e_t (u_{t,i} u_{t-k,j} - mean).
  const auto block = static_cast<Eigen::Index>(std::ceil(std::cbrt(Td)));
  const Eigen::Index n_blocks = (T + block - 1) / block;
  std::vector<double> maxima(static_cast<std::size_t>(n_boot));
  const Rng root(seed);
  Vector e(T);
  Matrix weighted;
  Matrix acc(d, d);
  for (int b = 0; b < n_boot; ++b) {
    Rng rng = root.substream(static_cast<std::uint64_t>(b));
    for (Eigen::Index blk = 0; blk < n_blocks; ++blk) {
      const double z = rng.normal();
      const Eigen::Index lo = blk * block;
      const Eigen::Index hi = std::min(T, lo + block);
      e.segment(lo, hi - lo).setConstant(z);
    }
    double g = 0.0;
    for (int k = 1; k <= m; ++k) {
      const Eigen::Index n = T - k;
      weighted = u.bottomRows(n).array().colwise() * e.tail(n).array();
      acc.noalias() = weighted.transpose() * u.topRows(n);
      // Centre each summand by its sample mean over the n products.
      const double esum = e.tail(n).sum();
      acc -= (esum * Td / static_cast<double>(n)) * rho[static_cast<std::size_t>(k - 1)];
      g = std::max(g, acc.cwiseAbs().maxCoeff() / root_t);
    }
    maxima[static_cast<std::size_t>(b)] = g;
  }
  std::vector<double> sorted = maxima;
  std::sort(sorted.begin(), sorted.end());
  const auto idx = static_cast<std::size_t>(
      std::clamp<double>(std::ceil((1.0 - alpha) * n_boot) - 1.0, 0.0, n_boot - 1.0));

  TestOutcome out;
  out.statistic = stat;
  out.threshold = sorted[idx];
  out.p_value = static_cast<double>(std::count_if(maxima.begin(), maxima.end(),
                                                  [&](double g) { return g >= stat; })) /
                n_boot;
  out.reject = stat > out.threshold;
  out.method = TestMethod::CyzMax;
  out.d = static_cast<int>(d);
  out.m = m;
  out.lags_evaluated = m;
  return out;
}

TestMethod resolve_test(TestMethod requested, Eigen::Index p1, Eigen::Index p2, Eigen::Index T) {
  if (requested != TestMethod::Auto) return requested;
  const Eigen::Index d = p1 * p2;
  return (d <= 36 && T >= 4 * d) ? TestMethod::LjungBox : TestMethod::TsayRank;
}

std::string_view to_string(PathStage stage) noexcept {
  switch (stage) {
    case PathStage::Diagonal: return "diagonal";
    case PathStage::Escalation: return "escalation";
    case PathStage::RowBacktest: return "row";
    case PathStage::ColumnBacktest: return "column";
  }
  return "unknown";
}

namespace {

class BlockTester {
 public:
  BlockTester(const MatrixSeries& n, const EstimationConfig& cfg, TestMethod method)
      : n_(n), cfg_(cfg), method_(method), total_energy_(n.stacked().squaredNorm()) {}

  // Tests whiteness of vec(N_t(i, j)) with 1-based (i, j).
  PathStep run(PathStage stage, int i, int j) {
    // Back-tests can revisit a block already tested on the diagonal.
    if (const auto hit = cache_.find({i, j}); hit != cache_.end()) {
      PathStep step = hit->second;
      step.stage = stage;
      return step;
    }
    PathStep step = evaluate(i, j);
    cache_.emplace(std::make_pair(i, j), step);
    step.stage = stage;
    return step;
  }

 private:
  PathStep evaluate(int i, int j) {
    PathStep step;
    step.row_start = i;
    step.col_start = j;
    MatrixSeries block = n_.lower_right(i - 1, j - 1);
    const Eigen::Index T = n_.length();
    if (block.rows() * block.cols() >= T) {
      const auto side = std::max<Eigen::Index>(
          1, static_cast<Eigen::Index>(std::floor(std::sqrt(cfg_.epsilon * T))));
      block = block.top_left(std::min(block.rows(), side), std::min(block.cols(), side));
    }
    step.block_rows = static_cast<int>(block.rows());
    step.block_cols = static_cast<int>(block.cols());
    step.outcome.method = method_;
    step.outcome.d = step.block_rows * step.block_cols;
    step.outcome.m = cfg_.m;

    // Rounding residue of an exactly low-rank panel is not a time series.
    if (block.stacked().squaredNorm() <= 1e-24 * total_energy_) {
      step.null_block = true;
      step.outcome.p_value = 1.0;
      return step;
    }
    const Matrix x = block.as_vector_rows();
    switch (method_) {
      case TestMethod::LjungBox:
        try {
          step.outcome = ljung_box(x, cfg_.m, cfg_.alpha);
        } catch (const Error& e) {
          // An automatic choice must not fail on a rank-deficient block; the
          // rank test needs no covariance inverse.
          if (cfg_.test != TestMethod::Auto || e.kind() != ErrorKind::SingularCovariance) throw;
          step.outcome = tsay_rank_test(x, cfg_.m, cfg_.alpha, true, cfg_.rank_pca);
        }
        break;
      case TestMethod::CyzMax:
        step.outcome = cyz_max_test(x, cfg_.m, cfg_.alpha, cfg_.n_boot,
                                    Rng(cfg_.seed, ++calls_).next_u64());
        break;
      case TestMethod::TsayRank:
      case TestMethod::Auto:
        step.outcome = tsay_rank_test(x, cfg_.m, cfg_.alpha, /*early_exit=*/true, cfg_.rank_pca);
        break;
    }
    return step;
  }

  const MatrixSeries& n_;
  const EstimationConfig& cfg_;
  TestMethod method_;
  double total_energy_;
  std::uint64_t calls_ = 0;
  std::map<std::pair<int, int>, PathStep> cache_;
};

}  // namespace

WhitenessReport diagonal_path_order(const MatrixSeries& y, const Matrix& gamma1,
                                    const Matrix& gamma2, const EstimationConfig& cfg) {
  const Eigen::Index p1 = y.rows();
  const Eigen::Index p2 = y.cols();
  require(gamma1.rows() == p1 && gamma1.cols() == p1 && gamma2.rows() == p2 &&
              gamma2.cols() == p2,
          ErrorKind::InvalidInput, "diagonal_path_order: Gamma matrices must be p1xp1 and p2xp2");
  require(orthonormality_error(gamma1) < 1e-6 && orthonormality_error(gamma2) < 1e-6,
          ErrorKind::InvalidInput, "diagonal_path_order: Gamma matrices must be orthogonal");

  WhitenessReport report;
  report.method = resolve_test(cfg.test, p1, p2, y.length());
  const MatrixSeries n = y.project_both(gamma1, gamma2);
  BlockTester tester(n, cfg, report.method);
  auto test = [&](PathStage stage, int i, int j) {
    report.trace.push_back(tester.run(stage, i, j));
    return report.trace.back().outcome.reject;
  };

  const int q1 = static_cast<int>(p1);
  const int q2 = static_cast<int>(p2);
  const int lmax = std::min(q1, q2);

  int l = 1;
  bool accepted = false;
  for (; l <= lmax; ++l) {
    if (!test(PathStage::Diagonal, l, l)) {
      accepted = true;
      break;
    }
  }

  if (!accepted) {
    // Every diagonal block rejected: walk along the longer dimension.
    report.exhausted = true;
    report.l_star = lmax;
    if (q1 <= q2) {
      int r2 = q2 - 1;
      for (int j = 1; q1 + j <= q2; ++j) {
        if (!test(PathStage::Escalation, q1, q1 + j)) {
          r2 = q1 + j - 1;
          break;
        }
      }
      report.r1_hat = q1 - 1;
      report.r2_hat = std::min(r2, q2 - 1);
    } else {
      int r1 = q1 - 1;
      for (int i = 1; q2 + i <= q1; ++i) {
        if (!test(PathStage::Escalation, q2 + i, q2)) {
          r1 = q2 + i - 1;
          break;
        }
      }
      report.r1_hat = std::min(r1, q1 - 1);
      report.r2_hat = q2 - 1;
    }
    return report;
  }

  report.l_star = l;
  if (l == 1) {
    report.order_zero = true;
    return report;
  }

  // Row back-test on N(l*-1+i, l*-1) until the first acceptance.
  int i_star = q1 - l + 2;
  bool row_found = false;
  for (int i = 1; l - 1 + i <= q1; ++i) {
    if (!test(PathStage::RowBacktest, l - 1 + i, l - 1)) {
      i_star = i;
      row_found = true;
      break;
    }
  }
  report.i_star = i_star;
  int r1 = l + i_star - 2;
  if (!row_found || r1 >= q1) {
    report.exhausted = true;
    r1 = q1 - 1;
  }

  // Column back-test on N(l*+i*-2, l*-1+j).
  int j_star = q2 - l + 2;
  bool col_found = false;
  for (int j = 1; l - 1 + j <= q2; ++j) {
    const bool reject = test(PathStage::ColumnBacktest, r1, l - 1 + j);
    const bool stop = cfg.column_rule == ColumnRule::FirstAccept ? !reject : reject;
    if (stop) {
      j_star = j;
      col_found = true;
      break;
    }
  }
  report.j_star = j_star;
  int r2 = l + j_star - 2;
  if (!col_found || r2 >= q2) {
    report.exhausted = true;
    r2 = q2 - 1;
  }
  report.r1_hat = r1;
  report.r2_hat = r2;
  return report;
}

}  // namespace matfactor
