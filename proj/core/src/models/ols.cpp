#include "fpp/models/ols.hpp"

#include <string>

#include "fpp/error.hpp"

namespace fpp {

PolynomialHead ols_fit(const Points2& y, const Eigen::Ref<const Vector>& targets, int degree, double ridge) {
  if (degree < 1) throw ValidationError("ols_fit: degree must be >= 1");
  const int m = monomial_count(degree);
  if (y.rows() < m) {
    throw ValidationError("ols_fit: need n >= M=" + std::to_string(m) + " samples, got " +
                          std::to_string(y.rows()));
  }
  if (targets.size() != y.rows()) throw ValidationError("ols_fit: target count mismatch");
  const Matrix phi = design_matrix(y, degree);
  Matrix normal = phi.transpose() * phi;
  normal.diagonal().array() += ridge;
  PolynomialHead head{degree, normal.ldlt().solve(phi.transpose() * targets)};
  return head;
}

}  // namespace fpp
