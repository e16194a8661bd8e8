#pragma once

#include <span>

#include "fpp/types.hpp"

namespace fpp {

struct LossValue {
  double value = 0.0;
  /// Residuals (MSE) or true-class probabilities (cross-entropy).
  Vector per_sample;
};

/// (1/n) sum (pred - target)^2.
LossValue mse_loss(const Eigen::Ref<const Vector>& predictions, const Eigen::Ref<const Vector>& targets);

/// 1 - SS_res / SS_tot; negative when worse than predicting the mean.
/// Throws on n < 2 or zero target variance.
double r2_score(const Eigen::Ref<const Vector>& predictions, const Eigen::Ref<const Vector>& targets);

/// -(1/n) sum log max(p_i[label_i], 1e-12). Rows must sum to 1 within 1e-8.
LossValue cross_entropy_loss(const Matrix& probabilities, std::span<const int> labels);

/// Fraction of equal entries.
double accuracy(std::span<const int> predicted, std::span<const int> labels);

}  // namespace fpp
