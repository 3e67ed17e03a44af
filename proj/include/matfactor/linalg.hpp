#pragma once

#include <Eigen/Dense>

namespace matfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace matfactor
