#pragma once

#include "matfactor/linalg.hpp"

#include <cstdint>

namespace matfactor {

/// A p x r matrix with orthonormal columns. Only the span is meaningful to
/// the estimators; individual columns are an arbitrary basis of it.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;

  /// Validates H'H = I within `tol` (max-abs entry norm).
  static OrthonormalBasis from_matrix(Matrix m, double tol = 1e-8);
  /// Wraps a matrix already known to be orthonormal, e.g. eigenvectors.
  static OrthonormalBasis trusted(Matrix m) { return OrthonormalBasis(std::move(m)); }

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  Eigen::Index rank() const noexcept { return m_.cols(); }

  OrthonormalBasis leading(Eigen::Index r) const { return trusted(m_.leftCols(r)); }
  OrthonormalBasis trailing(Eigen::Index r) const { return trusted(m_.rightCols(r)); }

 private:
  explicit OrthonormalBasis(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   // non-increasing
  Matrix vectors;  // column i pairs with values(i)
};

/// Full symmetric eigen-decomposition of (M + M')/2, eigenvalues descending.
/// Each eigenvector is signed so that its largest-magnitude entry is >= 0.
EigenDecomposition sym_eigen(const Matrix& m);

/// Max-abs deviation of H'H from the identity.
double orthonormality_error(const Matrix& h);

/// sqrt(1 - tr(H1 H1' H2 H2') / r) for two p x r orthonormal matrices.
double orthonormal_distance(const Matrix& h1, const Matrix& h2);
inline double orthonormal_distance(const OrthonormalBasis& a, const OrthonormalBasis& b) {
  return orthonormal_distance(a.matrix(), b.matrix());
}

/// Distance between column spans of full-rank matrices of possibly unequal
/// width: sqrt(1 - tr(P1 P2) / max(h1, h2)) with P_i the projector onto span(H_i).
/// Zero iff one span contains the other.
double projection_distance(const Matrix& h1, const Matrix& h2);

/// Orthonormal basis of span(H) taken from its left singular vectors.
/// Throws RankDeficient when sigma_min <= 1e-10 * sigma_max.
Matrix column_space(const Matrix& h);

/// Thin-QR orthonormalization of a seeded standard-normal p x r matrix.
OrthonormalBasis random_orthonormal(Eigen::Index p, Eigen::Index r, std::uint64_t seed);

/// The leading r left singular vectors of h (r <= rank(h) is not checked).
Matrix leading_left_singular(const Matrix& h, Eigen::Index r);

}  // namespace matfactor
