#include "matfactor/series.hpp"

#include "matfactor/error.hpp"

#include <string>

namespace matfactor {

MatrixSeries::MatrixSeries(Eigen::Index p1, Eigen::Index p2, Eigen::Index T)
    : p1_(p1), p2_(p2), data_(Matrix::Zero(p1 * p2, T)) {
  require(p1 > 0 && p2 > 0 && T >= 0, ErrorKind::InvalidInput,
          "MatrixSeries dimensions must be positive");
}

MatrixSeries::MatrixSeries(Eigen::Index p1, Eigen::Index p2, Matrix stacked)
    : p1_(p1), p2_(p2), data_(std::move(stacked)) {
  require(p1 > 0 && p2 > 0 && data_.rows() == p1 * p2, ErrorKind::InvalidInput,
          "stacked series has " + std::to_string(data_.rows()) + " rows, expected " +
              std::to_string(p1 * p2));
}

MatrixSeries::ConstSlice MatrixSeries::at(Eigen::Index t) const {
  return ConstSlice(data_.col(t).data(), p1_, p2_);
}

MatrixSeries::Slice MatrixSeries::at(Eigen::Index t) {
  return Slice(data_.col(t).data(), p1_, p2_);
}

void MatrixSeries::set(Eigen::Index t, const Matrix& value) {
  require(value.rows() == p1_ && value.cols() == p2_, ErrorKind::InvalidInput,
          "MatrixSeries::set shape mismatch");
  at(t) = value;
}

MatrixSeries MatrixSeries::head(Eigen::Index n) const {
  require(n >= 0 && n <= length(), ErrorKind::InvalidInput, "head beyond series length");
  return MatrixSeries(p1_, p2_, Matrix(data_.leftCols(n)));
}

MatrixSeries MatrixSeries::transposed() const {
  MatrixSeries out(p2_, p1_, length());
  for (Eigen::Index t = 0; t < length(); ++t) out.at(t) = at(t).transpose();
  return out;
}

MatrixSeries MatrixSeries::project_right(const Matrix& right) const {
  require(right.rows() == p2_, ErrorKind::InvalidInput, "project_right shape mismatch");
  MatrixSeries out(p1_, right.cols(), length());
  for (Eigen::Index t = 0; t < length(); ++t) out.at(t).noalias() = at(t) * right;
  return out;
}

MatrixSeries MatrixSeries::project_both(const Matrix& left, const Matrix& right) const {
  require(left.rows() == p1_ && right.rows() == p2_, ErrorKind::InvalidInput,
          "project_both shape mismatch");
  MatrixSeries out(left.cols(), right.cols(), length());
  Matrix tmp(left.cols(), p2_);
  for (Eigen::Index t = 0; t < length(); ++t) {
    tmp.noalias() = left.transpose() * at(t);
    out.at(t).noalias() = tmp * right;
  }
  return out;
}

MatrixSeries MatrixSeries::lower_right(Eigen::Index r0, Eigen::Index c0) const {
  require(r0 >= 0 && r0 < p1_ && c0 >= 0 && c0 < p2_, ErrorKind::InvalidInput,
          "lower_right block out of range");
  MatrixSeries out(p1_ - r0, p2_ - c0, length());
  for (Eigen::Index t = 0; t < length(); ++t)
    out.at(t) = at(t).bottomRightCorner(p1_ - r0, p2_ - c0);
  return out;
}

MatrixSeries MatrixSeries::top_left(Eigen::Index nr, Eigen::Index nc) const {
  require(nr > 0 && nr <= p1_ && nc > 0 && nc <= p2_, ErrorKind::InvalidInput,
          "top_left block out of range");
  MatrixSeries out(nr, nc, length());
  for (Eigen::Index t = 0; t < length(); ++t) out.at(t) = at(t).topLeftCorner(nr, nc);
  return out;
}

Matrix MatrixSeries::time_mean() const {
  require(length() > 0, ErrorKind::InsufficientData, "mean of an empty series");
  Vector m = data_.rowwise().mean();
  return Eigen::Map<const Matrix>(m.data(), p1_, p2_);
}

MatrixSeries MatrixSeries::centered() const {
  MatrixSeries out(*this);
  if (length() == 0) return out;
  Vector m = data_.rowwise().mean();
  out.data_.colwise() -= m;
  return out;
}

}  // namespace matfactor
