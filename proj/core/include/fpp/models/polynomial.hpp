#pragma once

#include <utility>
#include <vector>

#include "fpp/types.hpp"

namespace fpp {

/// (degree + 1)(degree + 2) / 2.
int monomial_count(int degree);

/// Exponent pairs (a, b) of y1^a y2^b in graded-lexicographic order:
/// total degree ascending, then a descending. Degree 2 gives
/// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
std::vector<std::pair<int, int>> monomial_exponents(int degree);

/// [1, y1, y2, y1^2, y1 y2, y2^2, ...] in the order above.
Vector monomial_basis(const Vec2& y, int degree);

/// n x M design matrix, one monomial_basis row per point.
Matrix design_matrix(const Points2& y, int degree);

/// Polynomial regressor g(y) = theta . phi(y) on the embedded plane.
struct PolynomialHead {
  int degree = 3;
  Vector coefficients;

  static PolynomialHead zeros(int degree);

  double predict(const Vec2& y) const;
  Vector predict(const Points2& y) const;
  /// Throws ValidationError when the coefficient count or values are bad.
  void validate() const;
};

struct PolynomialGradient {
  double loss = 0.0;  // batch MSE
  Vector coefficients;
  Points2 inputs;  // dL/dy, n x 2
};

/// Batch MSE and its exact gradients:
///   dL/dtheta = (2/n) Phi^T (Phi theta - f),
///   dL/dy_i   = (2/n) (g(y_i) - f_i) grad_y g(y_i).
PolynomialGradient head_gradients(const PolynomialHead& head, const Points2& y,
                                  const Eigen::Ref<const Vector>& targets);

}  // namespace fpp
