// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace vlcsee {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using IntMatrix = Eigen::MatrixXi;

}  // namespace vlcsee
