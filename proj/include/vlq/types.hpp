#pragma once

#include <Eigen/Dense>

namespace vlq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace vlq
