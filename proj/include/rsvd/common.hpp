#pragma once

#include <Eigen/Dense>

namespace rsvd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Index = Eigen::Index;

}  // namespace rsvd
