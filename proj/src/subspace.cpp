#include "matfactor/subspace.hpp"

#include "matfactor/error.hpp"
#include "matfactor/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matfactor {

namespace {
constexpr double kRankTol = 1e-10;

void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}
}  // namespace

OrthonormalBasis OrthonormalBasis::from_matrix(Matrix m, double tol) {
  require(m.rows() > 0 && m.cols() > 0 && m.cols() <= m.rows(), ErrorKind::InvalidInput,
          "orthonormal basis must be p x r with 0 < r <= p");
  require(m.allFinite(), ErrorKind::InvalidInput, "orthonormal basis has non-finite entries");
  const double err = orthonormality_error(m);
  require(err <= tol, ErrorKind::InvalidInput,
          "columns are not orthonormal (max |H'H - I| = " + std::to_string(err) + ")");
  return OrthonormalBasis(std::move(m));
}

EigenDecomposition sym_eigen(const Matrix& m) {
  require(m.rows() > 0 && m.rows() == m.cols(), ErrorKind::InvalidInput,
          "sym_eigen needs a non-empty square matrix");
  require(m.allFinite(), ErrorKind::InvalidInput, "sym_eigen input has non-finite entries");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  require(solver.info() == Eigen::Success, ErrorKind::InvalidInput,
          "symmetric eigen-solver failed to converge");

  const Eigen::Index p = m.rows();
  EigenDecomposition out{Vector(p), Matrix(p, p)};
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < p; ++i) {
    out.values(i) = solver.eigenvalues()(p - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(p - 1 - i);
    fix_sign(out.vectors.col(i));
  }
  return out;
}

double orthonormality_error(const Matrix& h) {
  const Matrix gram = h.transpose() * h;
  return (gram - Matrix::Identity(h.cols(), h.cols())).cwiseAbs().maxCoeff();
}

double orthonormal_distance(const Matrix& h1, const Matrix& h2) {
  require(h1.rows() == h2.rows() && h1.cols() == h2.cols() && h1.cols() > 0,
          ErrorKind::InvalidInput, "orthonormal_distance needs two p x r matrices of equal shape");
  const double r = static_cast<double>(h1.cols());
  const double overlap = (h1.transpose() * h2).squaredNorm();
  return std::sqrt(std::clamp(1.0 - overlap / r, 0.0, 1.0));
}

Matrix column_space(const Matrix& h) {
  require(h.rows() > 0 && h.cols() > 0 && h.cols() <= h.rows(), ErrorKind::InvalidInput,
          "column_space needs a p x h matrix with h <= p");
  require(h.allFinite(), ErrorKind::InvalidInput, "column_space input has non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  require(smax > 0.0 && smin > kRankTol * smax, ErrorKind::RankDeficient,
          "matrix is rank deficient (sigma_min / sigma_max = " +
              std::to_string(smax > 0 ? smin / smax : 0.0) + ")");
  return svd.matrixU();
}

double projection_distance(const Matrix& h1, const Matrix& h2) {
  require(h1.rows() == h2.rows(), ErrorKind::InvalidInput,
          "projection_distance needs matrices with the same row count");
  const Matrix u1 = column_space(h1);
  const Matrix u2 = column_space(h2);
  const double hmax = static_cast<double>(std::max(h1.cols(), h2.cols()));
  // tr(P1 P2) = ||U1' U2||_F^2
  const double overlap = (u1.transpose() * u2).squaredNorm();
  return std::sqrt(std::clamp(1.0 - overlap / hmax, 0.0, 1.0));
}

OrthonormalBasis random_orthonormal(Eigen::Index p, Eigen::Index r, std::uint64_t seed) {
  require(p > 0 && r > 0, ErrorKind::InvalidInput, "random_orthonormal needs p, r > 0");
  require(r <= p, ErrorKind::InvalidInput, "random_orthonormal needs r <= p");
  Rng rng(seed);
  Matrix g(p, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < p; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(p, r);
  const Matrix rr = qr.matrixQR().topLeftCorner(r, r);
  for (Eigen::Index j = 0; j < r; ++j)
    if (rr(j, j) < 0) q.col(j) = -q.col(j);
  return OrthonormalBasis::trusted(std::move(q));
}

Matrix leading_left_singular(const Matrix& h, Eigen::Index r) {
  require(r > 0 && r <= h.rows() && r <= h.cols(), ErrorKind::InvalidInput,
          "leading_left_singular: r out of range");
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(r);
  for (Eigen::Index j = 0; j < r; ++j) fix_sign(u.col(j));
  return u;
}

}  // namespace matfactor
