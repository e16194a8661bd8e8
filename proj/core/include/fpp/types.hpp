#pragma once

#include <Eigen/Dense>

namespace fpp {

/// Sample-major feature storage; rows are gathered into mini-batches.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x 2 embedded points, one row per sample.
using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;
/// D x 2 column basis.
using Basis2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

}  // namespace fpp
