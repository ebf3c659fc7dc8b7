#pragma once

#include <Eigen/Core>

namespace dpalm {

using Vector = Eigen::VectorXd;
// Dense, row-major storage throughout; matches the on-disk layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

} // namespace dpalm
