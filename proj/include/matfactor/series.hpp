#pragma once

#include "matfactor/linalg.hpp"

#include <Eigen/Dense>

namespace matfactor {

/// An ordered sequence of T real p1 x p2 matrices.
///
/// Storage is a (p1*p2) x T matrix whose column t holds vec(Y_t) in
/// column-major order, so column j of Y_t occupies rows [j*p1, (j+1)*p1).
/// Time indices are 0-based throughout the C++ API.
class MatrixSeries {
 public:
  using ConstSlice = Eigen::Map<const Matrix>;
  using Slice = Eigen::Map<Matrix>;

  MatrixSeries() = default;
  MatrixSeries(Eigen::Index p1, Eigen::Index p2, Eigen::Index T);
  /// Takes ownership of an existing stacked layout.
  MatrixSeries(Eigen::Index p1, Eigen::Index p2, Matrix stacked);

  Eigen::Index rows() const noexcept { return p1_; }
  Eigen::Index cols() const noexcept { return p2_; }
  Eigen::Index length() const noexcept { return data_.cols(); }
  bool empty() const noexcept { return data_.size() == 0; }

  ConstSlice at(Eigen::Index t) const;
  Slice at(Eigen::Index t);
  void set(Eigen::Index t, const Matrix& value);

  const Matrix& stacked() const noexcept { return data_; }
  Matrix& stacked() noexcept { return data_; }

  /// The p1 x T path of column j, i.e. y_{j,t} for all t.
  auto column_path(Eigen::Index j) const { return data_.middleRows(j * p1_, p1_); }

  /// First n observations.
  MatrixSeries head(Eigen::Index n) const;
  MatrixSeries transposed() const;
  /// Y_t * right for every t.
  MatrixSeries project_right(const Matrix& right) const;
  /// left' * Y_t * right for every t.
  MatrixSeries project_both(const Matrix& left, const Matrix& right) const;
  /// Rows [r0, p1) and columns [c0, p2) of every Y_t.
  MatrixSeries lower_right(Eigen::Index r0, Eigen::Index c0) const;
  /// Rows [0, nr) and columns [0, nc) of every Y_t.
  MatrixSeries top_left(Eigen::Index nr, Eigen::Index nc) const;

  /// Entrywise mean over time, p1 x p2.
  Matrix time_mean() const;
  MatrixSeries centered() const;

  /// T x (p1*p2) layout with one vec(Y_t) per row.
  Matrix as_vector_rows() const { return data_.transpose(); }

  bool all_finite() const { return data_.allFinite(); }

  friend bool operator==(const MatrixSeries& a, const MatrixSeries& b) {
    return a.p1_ == b.p1_ && a.p2_ == b.p2_ && a.data_.rows() == b.data_.rows() &&
           a.data_.cols() == b.data_.cols() && a.data_ == b.data_;
  }

 private:
  Eigen::Index p1_ = 0;
  Eigen::Index p2_ = 0;
  Matrix data_;
};

}  // namespace matfactor
