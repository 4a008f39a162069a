#pragma once

#include <Eigen/Dense>

namespace gendensity {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace gendensity
