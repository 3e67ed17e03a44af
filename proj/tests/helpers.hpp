#pragma once

#include "matfactor/linalg.hpp"
#include "matfactor/rng.hpp"
#include "matfactor/series.hpp"

#include <cmath>
#include <cstdint>

namespace testing_support {

using matfactor::Matrix;
using matfactor::MatrixSeries;
using matfactor::Vector;

inline Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  matfactor::Rng rng(seed, 99);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Matrix random_rotation(Eigen::Index r, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(normal_matrix(r, r, seed));
  return qr.householderQ() * Matrix::Identity(r, r);
}

inline Matrix orthonormal_columns(Eigen::Index p, Eigen::Index r, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(normal_matrix(p, r, seed));
  return qr.householderQ() * Matrix::Identity(p, r);
}

// Completes the span of h (p x r, full rank) to an orthogonal p x p matrix whose
// first r columns span h.
inline Matrix completed_basis(const Matrix& h) {
  Eigen::HouseholderQR<Matrix> qr(h);
  return qr.householderQ() * Matrix::Identity(h.rows(), h.rows());
}

inline MatrixSeries normal_panel(Eigen::Index p1, Eigen::Index p2, Eigen::Index T,
                                 std::uint64_t seed) {
  return MatrixSeries(p1, p2, normal_matrix(p1 * p2, T, seed));
}

// T x d matrix of iid N(0, 1) rows.
inline Matrix white_rows(Eigen::Index T, Eigen::Index d, std::uint64_t seed) {
  return normal_matrix(T, d, seed);
}

// T x d matrix whose columns are independent AR(1) paths.
inline Matrix ar1_rows(Eigen::Index T, Eigen::Index d, double phi, std::uint64_t seed) {
  Matrix e = normal_matrix(T, d, seed);
  for (Eigen::Index t = 1; t < T; ++t) e.row(t) += phi * e.row(t - 1);
  return e;
}

}  // namespace testing_support
