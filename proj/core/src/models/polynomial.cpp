#include "fpp/models/polynomial.hpp"

#include <cmath>
#include <string>

#include "fpp/error.hpp"

namespace fpp {

namespace {

// Row i holds y^0 .. y^degree for one coordinate.
Matrix powers(const Eigen::Ref<const Vector>& y, int degree) {
  Matrix p(y.size(), degree + 1);
  p.col(0).setOnes();
  for (int k = 1; k <= degree; ++k) p.col(k) = p.col(k - 1).cwiseProduct(y);
  return p;
}

}  // namespace

int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

std::vector<std::pair<int, int>> monomial_exponents(int degree) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(monomial_count(degree)));
  for (int total = 0; total <= degree; ++total) {
    for (int a = total; a >= 0; --a) out.emplace_back(a, total - a);
  }
  return out;
}

Vector monomial_basis(const Vec2& y, int degree) {
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
  Vector phi(monomial_count(degree));
  Eigen::Index m = 0;
  for (const auto& [a, b] : monomial_exponents(degree)) {
    phi[m++] = std::pow(y[0], a) * std::pow(y[1], b);
  }
  return phi;
}

Matrix design_matrix(const Points2& y, int degree) {
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
  const Matrix p1 = powers(y.col(0), degree);
  const Matrix p2 = powers(y.col(1), degree);
  Matrix phi(y.rows(), monomial_count(degree));
  Eigen::Index m = 0;
  for (const auto& [a, b] : monomial_exponents(degree)) {
    phi.col(m++) = p1.col(a).cwiseProduct(p2.col(b));
  }
  return phi;
}

PolynomialHead PolynomialHead::zeros(int degree) {
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
  return PolynomialHead{degree, Vector::Zero(monomial_count(degree))};
}

void PolynomialHead::validate() const {
  if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
  if (coefficients.size() != monomial_count(degree)) {
    throw ValidationError("polynomial head of degree " + std::to_string(degree) + " needs " +
                          std::to_string(monomial_count(degree)) + " coefficients, has " +
                          std::to_string(coefficients.size()));
  }
  if (!coefficients.allFinite()) throw ValidationError("polynomial head has non-finite coefficients");
}

double PolynomialHead::predict(const Vec2& y) const {
  return coefficients.dot(monomial_basis(y, degree));
}

Vector PolynomialHead::predict(const Points2& y) const { return design_matrix(y, degree) * coefficients; }

PolynomialGradient head_gradients(const PolynomialHead& head, const Points2& y,
                                  const Eigen::Ref<const Vector>& targets) {
  const Eigen::Index n = y.rows();
  if (targets.size() != n) throw ValidationError("head_gradients: target count mismatch");
  if (n == 0) throw ValidationError("head_gradients: empty batch");

  const int degree = head.degree;
  const Matrix p1 = powers(y.col(0), degree);
  const Matrix p2 = powers(y.col(1), degree);
  const auto exps = monomial_exponents(degree);
  const Eigen::Index m = static_cast<Eigen::Index>(exps.size());

  Matrix phi(n, m);
  Vector d1 = Vector::Zero(n);  // d g / d y1
  Vector d2 = Vector::Zero(n);  // d g / d y2
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [a, b] = exps[static_cast<std::size_t>(k)];
    phi.col(k) = p1.col(a).cwiseProduct(p2.col(b));
    const double c = head.coefficients[k];
    if (c == 0.0) continue;
    if (a > 0) d1 += (c * a) * p1.col(a - 1).cwiseProduct(p2.col(b));
    if (b > 0) d2 += (c * b) * p1.col(a).cwiseProduct(p2.col(b - 1));
  }

  const Vector residual = phi * head.coefficients - targets;
  const double scale = 2.0 / static_cast<double>(n);
  PolynomialGradient g;
  g.loss = residual.squaredNorm() / static_cast<double>(n);
  g.coefficients = scale * (phi.transpose() * residual);
  g.inputs.resize(n, 2);
  g.inputs.col(0) = scale * residual.cwiseProduct(d1);
  g.inputs.col(1) = scale * residual.cwiseProduct(d2);
  return g;
}

}  // namespace fpp
