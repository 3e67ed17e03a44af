#include "matfactor/estimate.hpp"

#include "matfactor/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace matfactor {

std::string_view to_string(MomentKind kind) noexcept {
  switch (kind) {
    case MomentKind::M1: return "M1";
    case MomentKind::M2: return "M2";
    case MomentKind::M1Star: return "M1_star";
    case MomentKind::M2Star: return "M2_star";
    case MomentKind::S1: return "S1";
    case MomentKind::S2: return "S2";
  }
  return "unknown";
}

Matrix col_autocov(const MatrixSeries& y, Eigen::Index i, Eigen::Index j, int k) {
  const Eigen::Index T = y.length();
  require(i >= 0 && i < y.cols() && j >= 0 && j < y.cols(), ErrorKind::InvalidInput,
          "col_autocov: column index out of range");
  require(k >= 1 && k < T, ErrorKind::InvalidInput, "col_autocov: need 1 <= k < T");
  const auto lead = y.column_path(i).rightCols(T - k);
  const auto lag = y.column_path(j).leftCols(T - k);
  return lead * lag.transpose() / static_cast<double>(T);
}

namespace {

Matrix m1_matrix(const MatrixSeries& y, int k0) {
  const Eigen::Index T = y.length();
  const Eigen::Index p1 = y.rows();
  const Eigen::Index p2 = y.cols();
  require(k0 >= 1, ErrorKind::InvalidInput, "moment matrix: k0 must be >= 1");
  require(T > k0, ErrorKind::InsufficientData,
          "moment matrix: need T > k0 (T = " + std::to_string(T) + ")");
  const Matrix& data = y.stacked();
  Matrix m = Matrix::Zero(p1, p1);
  Matrix g;
  for (int k = 1; k <= k0; ++k) {
    // Row block i of g is [S_i1(k), ..., S_ip2(k)], so sum_j S_ij S_ij' = g_i g_i'.
    g.noalias() = data.rightCols(T - k) * data.leftCols(T - k).transpose();
    g /= static_cast<double>(T);
    for (Eigen::Index i = 0; i < p2; ++i) {
      const auto gi = g.middleRows(i * p1, p1);
      m.noalias() += gi * gi.transpose();
    }
  }
  return 0.5 * (m + m.transpose());
}

Matrix leading_columns(const EigenDecomposition& e, Eigen::Index r) {
  return e.vectors.leftCols(r);
}

}  // namespace

MomentMatrix build_m1(const MatrixSeries& y, int k0) {
  return {m1_matrix(y, k0), MomentKind::M1, k0};
}

MomentMatrix build_m2(const MatrixSeries& y, int k0) {
  return {m1_matrix(y.transposed(), k0), MomentKind::M2, k0};
}

MomentMatrix build_m_star(const MatrixSeries& y, const Matrix& back, int k0) {
  require(back.rows() == y.cols() && back.cols() >= 1, ErrorKind::InvalidInput,
          "build_m_star: back basis must be p2 x r");
  return {m1_matrix(y.project_right(back), k0), MomentKind::M1Star, k0};
}

MomentMatrix build_m_star_front(const MatrixSeries& y, const Matrix& front, int k0) {
  require(front.rows() == y.rows() && front.cols() >= 1, ErrorKind::InvalidInput,
          "build_m_star_front: front basis must be p1 x r");
  return {m1_matrix(y.transposed().project_right(front), k0), MomentKind::M2Star, k0};
}

LoadingIterate iterate_loadings(const MatrixSeries& y, int r1_0, int r2_0, const Matrix& P_init,
                                const EstimationConfig& cfg) {
  const Eigen::Index p1 = y.rows();
  const Eigen::Index p2 = y.cols();
  require(r1_0 >= 1 && r1_0 < p1 && r2_0 >= 1 && r2_0 < p2, ErrorKind::InvalidInput,
          "iterate_loadings: initial orders must satisfy 1 <= r < p");
  require(P_init.rows() == p2 && P_init.cols() == r2_0, ErrorKind::InvalidInput,
          "iterate_loadings: P_init must be p2 x r2_0");
  require(orthonormality_error(P_init) < 1e-8, ErrorKind::InvalidInput,
          "iterate_loadings: P_init is not semi-orthogonal");

  LoadingIterate out;
  Matrix back = P_init;

  auto pass = [&](const Matrix& current_back) {
    const EigenDecomposition front = sym_eigen(build_m_star(y, current_back, cfg.k0).matrix);
    const Matrix a = leading_columns(front, r1_0);
    const EigenDecomposition rear = sym_eigen(build_m_star_front(y, a, cfg.k0).matrix);
    out.gamma1 = front.vectors;
    out.values1 = front.values;
    out.gamma2 = rear.vectors;
    out.values2 = rear.values;
    return std::pair<Matrix, Matrix>(a, leading_columns(rear, r2_0));
  };

  auto [a, p] = pass(back);
  for (int i = 1; i <= cfg.s0; ++i) {
    auto [a_next, p_next] = pass(p);
    const double da = orthonormal_distance(a_next, a);
    const double dp = orthonormal_distance(p_next, p);
    out.steps.emplace_back(da, dp);
    a = std::move(a_next);
    p = std::move(p_next);
    out.n_iter = i;
    if (da < cfg.eta && dp < cfg.eta) {
      out.converged = true;
      break;
    }
  }
  out.A = OrthonormalBasis::trusted(std::move(a));
  out.P = OrthonormalBasis::trusted(std::move(p));
  return out;
}

MomentMatrix build_s1(const MatrixSeries& y, const Matrix& B1, const Matrix& Q1) {
  const Eigen::Index p1 = y.rows();
  const Eigen::Index p2 = y.cols();
  require(B1.rows() == p1 && Q1.rows() == p2, ErrorKind::InvalidInput,
          "build_s1: complement bases do not match the panel dimensions");
  require(y.length() >= 1, ErrorKind::InsufficientData, "build_s1: empty series");
  Matrix s = Matrix::Zero(p1, p1);
  if (B1.cols() == 0 || Q1.cols() == 0) return {s, MomentKind::S1, std::nullopt};
  // Columns hold vec(B1' Y_t Q1), i.e. vec(Y_t)'(Q1 kron B1) transposed.
  const Matrix w = y.project_both(B1, Q1).stacked();
  const double T = static_cast<double>(y.length());
  Matrix omega;
  for (Eigen::Index i = 0; i < p2; ++i) {
    omega.noalias() = y.column_path(i) * w.transpose();
    omega /= T;
    s.noalias() += omega * omega.transpose();
  }
  return {0.5 * (s + s.transpose()), MomentKind::S1, std::nullopt};
}

MomentMatrix build_s2(const MatrixSeries& y, const Matrix& B1, const Matrix& Q1) {
  MomentMatrix m = build_s1(y.transposed(), Q1, B1);
  m.kind = MomentKind::S2;
  return m;
}

int ratio_min(const Vector& eigenvalues, int R) {
  require(R >= 1, ErrorKind::InvalidInput, "ratio_min: R must be >= 1");
  require(eigenvalues.size() >= R + 1, ErrorKind::InvalidInput,
          "ratio_min: need at least R + 1 eigenvalues");
  require(eigenvalues.allFinite() && eigenvalues(0) > 0.0, ErrorKind::InvalidInput,
          "ratio_min: eigenvalues must be finite with a positive leading value");
  const double floor = 1e-12 * eigenvalues(0);
  int best = 1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= R; ++j) {
    const double lo = std::max(eigenvalues(j), floor);
    const double hi = std::max(eigenvalues(j - 1), floor);
    const double ratio = lo / hi;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = j;
    }
  }
  return best;
}

int wlc_order(const Vector& eigenvalues) {
  const auto p = static_cast<int>(eigenvalues.size());
  if (p < 2 || !(eigenvalues(0) > 0.0)) return 1;
  return ratio_min(eigenvalues, p / 2);
}

MitigationSubspace select_mitigation_subspace(const Matrix& B2, const Matrix& A1, int r) {
  require(B2.rows() == A1.rows(), ErrorKind::InvalidInput,
          "select_mitigation_subspace: row dimensions differ");
  require(r >= 1 && r <= B2.cols(), ErrorKind::InvalidInput,
          "select_mitigation_subspace: need 1 <= r <= columns of B2");
  const Matrix g = B2.transpose() * A1;
  const EigenDecomposition e = sym_eigen(g * g.transpose());
  MitigationSubspace out;
  out.basis = B2 * e.vectors.leftCols(r);
  out.alignment = e.values.head(r);
  out.degenerate = !(out.alignment.maxCoeff() > 1e-12);
  return out;
}

MatrixSeries recover_factors(const MatrixSeries& y, const Matrix& A1, const Matrix& P1,
                             const Matrix& B2_star, const Matrix& Q2_star) {
  require(A1.rows() == y.rows() && B2_star.rows() == y.rows() && P1.rows() == y.cols() &&
              Q2_star.rows() == y.cols(),
          ErrorKind::InvalidInput, "recover_factors: loading rows do not match the panel");
  require(B2_star.cols() == A1.cols() && Q2_star.cols() == P1.cols(), ErrorKind::InvalidInput,
          "recover_factors: bracket matrices must be square");
  const Matrix left_bracket = B2_star.transpose() * A1;
  const Matrix right_bracket = P1.transpose() * Q2_star;
  for (const auto* bracket : {&left_bracket, &right_bracket}) {
    Eigen::JacobiSVD<Matrix> svd(*bracket);
    const double smin = svd.singularValues().minCoeff();
    require(smin >= 1e-8, ErrorKind::SingularBracket,
            "recover_factors: bracket matrix is near-singular (sigma_min = " +
                std::to_string(smin) + ")");
  }
  const Matrix left = left_bracket.partialPivLu().solve(B2_star.transpose());  // r1 x p1
  // Q2* (P'Q2*)^{-1} = ((P'Q2*)^{-T} Q2*')'
  const Matrix right =
      right_bracket.transpose().partialPivLu().solve(Q2_star.transpose()).transpose();
  return y.project_both(left.transpose(), right);
}

Matrix FactorFit::fitted(Eigen::Index t) const {
  Matrix out = A1_hat * X_hat.at(t) * P1_hat.transpose();
  if (center.size() == out.size()) out += center;
  return out;
}

namespace {

// Span of `given` completed to `width` columns with directions from `pool`.
Matrix complete_basis(const Matrix& given, const Matrix& pool, Eigen::Index width) {
  Matrix u = column_space(given);
  if (u.cols() >= width) return u.leftCols(width);
  Matrix out(u.rows(), width);
  out.leftCols(u.cols()) = u;
  Eigen::Index filled = u.cols();
  for (Eigen::Index c = 0; c < pool.cols() && filled < width; ++c) {
    Vector v = pool.col(c);
    for (int pass = 0; pass < 2; ++pass)
      v -= out.leftCols(filled) * (out.leftCols(filled).transpose() * v);
    const double norm = v.norm();
    if (norm > 1e-6) out.col(filled++) = v / norm;
  }
  require(filled == width, ErrorKind::RankDeficient,
          "fit: could not complete the initial back loading");
  return out;
}

int ratio_cap_for(const EstimationConfig& cfg, int p, int r) {
  const int room = p - r - 1;
  const int base = cfg.ratio_cap ? *cfg.ratio_cap : std::min(room, p / 2);
  return std::min(base, room);
}

}  // namespace

FactorFit fit(const MatrixSeries& y_raw, const EstimationConfig& cfg, const FitOptions& options) {
  cfg.validate();
  const Eigen::Index T = y_raw.length();
  const Eigen::Index p1 = y_raw.rows();
  const Eigen::Index p2 = y_raw.cols();
  require(p1 >= 2 && p2 >= 2, ErrorKind::InvalidInput, "fit: both panel dimensions must be >= 2");
  require(T > cfg.k0 + cfg.m, ErrorKind::InsufficientData,
          "fit: need T > k0 + m (T = " + std::to_string(T) + ")");
  require(y_raw.all_finite(), ErrorKind::InvalidInput, "fit: panel has non-finite entries");

  FactorFit out;
  MatrixSeries y;
  if (cfg.center) {
    out.center = y_raw.time_mean();
    y = y_raw.centered();
  } else {
    out.center = Matrix::Zero(p1, p2);
    y = y_raw;
  }

  const EigenDecomposition m1 = sym_eigen(build_m1(y, cfg.k0).matrix);
  const EigenDecomposition m2 = sym_eigen(build_m2(y, cfg.k0).matrix);
  out.m1_values = m1.values;
  out.m2_values = m2.values;
  out.r1_wlc = wlc_order(m1.values);
  out.r2_wlc = wlc_order(m2.values);

  auto settle = [&](const WhitenessReport& report, const char* stage) {
    std::pair<int, int> r{report.r1_hat, report.r2_hat};
    if (report.order_zero || r.first == 0 || r.second == 0) {
      if (!cfg.order_fallback)
        fail(ErrorKind::OrderZero, std::string("fit: ") + stage +
                                       " order search found no autocorrelated block (l* = 1)");
      out.warnings.push_back(std::string(stage) +
                             " order search found only white noise; using order (1, 1)");
      r = {std::max(r.first, 1), std::max(r.second, 1)};
    }
    if (report.exhausted)
      out.warnings.push_back(std::string(stage) +
                             " order search rejected every test along a direction; the order is a "
                             "boundary value");
    return r;
  };

  std::pair<int, int> initial;
  if (options.fixed_orders) {
    initial = *options.fixed_orders;
    require(initial.first >= 1 && initial.first < p1 && initial.second >= 1 &&
                initial.second < p2,
            ErrorKind::InvalidInput, "fit: fixed orders must satisfy 1 <= r < p");
  } else {
    out.initial_report = diagonal_path_order(y, m1.vectors, m2.vectors, cfg);
    initial = settle(*out.initial_report, "initial");
  }
  out.r1_initial = initial.first;
  out.r2_initial = initial.second;
  out.A1_first = m1.vectors.leftCols(initial.first);
  out.P1_first = m2.vectors.leftCols(initial.second);

  Matrix p_init;
  if (options.initial_back) {
    require(options.initial_back->rows() == p2, ErrorKind::InvalidInput,
            "fit: initial back loading must have p2 rows");
    p_init = complete_basis(*options.initial_back, m2.vectors, initial.second);
  } else if (cfg.init == InitMode::Random) {
    p_init = random_orthonormal(p2, initial.second, cfg.seed).matrix();
  } else {
    p_init = out.P1_first;
  }

  const LoadingIterate it = iterate_loadings(y, initial.first, initial.second, p_init, cfg);
  out.n_iterations = it.n_iter;
  out.converged = it.converged;
  out.iteration_steps = it.steps;

  std::pair<int, int> final_orders;
  if (options.fixed_orders) {
    final_orders = *options.fixed_orders;
  } else {
    out.final_report = diagonal_path_order(y, it.gamma1, it.gamma2, cfg);
    final_orders = settle(*out.final_report, "final");
  }
  const int r1 = final_orders.first;
  const int r2 = final_orders.second;
  out.r1_hat = r1;
  out.r2_hat = r2;
  out.A1_hat = it.gamma1.leftCols(r1);
  out.B1_hat = it.gamma1.rightCols(p1 - r1);
  out.P1_hat = it.gamma2.leftCols(r2);
  out.Q1_hat = it.gamma2.rightCols(p2 - r2);

  const EigenDecomposition s1 = sym_eigen(build_s1(y, out.B1_hat, out.Q1_hat).matrix);
  const EigenDecomposition s2 = sym_eigen(build_s2(y, out.B1_hat, out.Q1_hat).matrix);
  out.s1_values = s1.values;
  out.s2_values = s2.values;

  // S1 and S2 are quartic in the data. At rounding level relative to the
  // panel scale there is no noise at all, and their leading direction would be
  // the loading space itself.
  const double scale = y.stacked().squaredNorm() / static_cast<double>(y.length());
  auto spikes = [&](const Vector& values, int p, int r) {
    const int cap = ratio_cap_for(cfg, p, r);
    if (cap < 1 || !(values(0) > 1e-24 * scale * scale)) return 0;
    return ratio_min(values, cap);
  };
  if (options.fixed_noise_orders) {
    out.k1_hat = options.fixed_noise_orders->first;
    out.k2_hat = options.fixed_noise_orders->second;
    require(out.k1_hat >= 0 && out.k1_hat <= p1 - r1 && out.k2_hat >= 0 && out.k2_hat <= p2 - r2,
            ErrorKind::InvalidInput, "fit: fixed spike counts must satisfy 0 <= k <= p - r");
  } else {
    out.k1_hat = spikes(s1.values, static_cast<int>(p1), r1);
    out.k2_hat = spikes(s2.values, static_cast<int>(p2), r2);
  }

  const Matrix B2 = s1.vectors.rightCols(p1 - out.k1_hat);
  const Matrix Q2 = s2.vectors.rightCols(p2 - out.k2_hat);
  const MitigationSubspace front = select_mitigation_subspace(B2, out.A1_hat, r1);
  const MitigationSubspace back = select_mitigation_subspace(Q2, out.P1_hat, r2);
  require(!front.degenerate && !back.degenerate, ErrorKind::Degenerate,
          "fit: the denoising subspace is orthogonal to the estimated loadings");
  out.B2_star = front.basis;
  out.Q2_star = back.basis;
  out.X_hat = recover_factors(y, out.A1_hat, out.P1_hat, out.B2_star, out.Q2_star);
  return out;
}

}  // namespace matfactor
