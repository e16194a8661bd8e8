#pragma once

#include "fpp/models/polynomial.hpp"

namespace fpp {

/// Least-squares polynomial head for fixed embedded points, solved through the
/// normal equations (Phi^T Phi + ridge I) theta = Phi^T f. The tiny ridge lets
/// collapsed (rank-deficient) embeddings still solve. Requires n >= M.
PolynomialHead ols_fit(const Points2& y, const Eigen::Ref<const Vector>& targets, int degree,
                       double ridge = 1e-10);

}  // namespace fpp
