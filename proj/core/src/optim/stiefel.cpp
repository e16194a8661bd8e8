#include "fpp/optim/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fpp/error.hpp"

namespace fpp {

namespace {

constexpr double kRankThreshold = 1e-12;

Vector random_unit_orthogonal_to(const Eigen::Ref<const Vector>& keep, Engine& engine) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector v(keep.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = standard_normal(engine);
    v -= keep.dot(v) * keep;
    v -= keep.dot(v) * keep;
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
  throw RuntimeError("retract: could not draw a replacement direction");
}

}  // namespace

double orthonormality_error(const Basis2& basis) {
  return (basis.transpose() * basis - Mat2::Identity()).norm();
}

ProjectionMatrix::ProjectionMatrix(Basis2 basis) : basis_(std::move(basis)) {
  if (basis_.rows() < 2) throw ValidationError("projection needs D >= 2 rows");
  const double err = fpp::orthonormality_error(basis_);
  if (!(err < kOrthonormalTolerance)) {
    throw ValidationError("projection columns are not orthonormal (||P^T P - I||_F = " +
                          std::to_string(err) + ")");
  }
}

double ProjectionMatrix::orthonormality_error() const { return fpp::orthonormality_error(basis_); }

SymmetricEigen2 symmetric_eigen2(const Mat2& m) {
  const double a = m(0, 0);
  const double b = 0.5 * (m(0, 1) + m(1, 0));
  const double c = m(1, 1);
  const double half_diff = 0.5 * (a - c);
  const double radius = std::hypot(half_diff, b);
  const double mid = 0.5 * (a + c);
  SymmetricEigen2 out;
  out.values[0] = mid + radius;
  // det / lambda1 keeps the small eigenvalue accurate when the two are far apart.
  const double det = a * c - b * b;
  out.values[1] = out.values[0] != 0.0 ? det / out.values[0] : mid - radius;
  const double angle = 0.5 * std::atan2(2.0 * b, a - c);
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  out.vectors << cs, -sn, sn, cs;
  return out;
}

ThinSvd2 thin_svd2(const Basis2& p) {
  const SymmetricEigen2 eig = symmetric_eigen2(p.transpose() * p);
  ThinSvd2 svd;
  svd.v = eig.vectors;
  svd.singular_values = eig.values.cwiseMax(0.0).cwiseSqrt();
  const Basis2 pv = p * svd.v;
  svd.u.resize(p.rows(), 2);
  for (int k = 0; k < 2; ++k) {
    const double s = svd.singular_values[k];
    svd.u.col(k) = s > 0.0 ? Vector(pv.col(k) / s) : Vector::Zero(p.rows());
  }
  return svd;
}

Retraction retract(const Basis2& p, RetractionMode mode, Engine* engine) {
  if (p.rows() < 2) throw ValidationError("retract: need D >= 2");
  if (!p.allFinite()) throw RuntimeError("retract: non-finite projection entries");
  const ThinSvd2 svd = thin_svd2(p);
  const double s1 = svd.singular_values[0];
  const double s2 = svd.singular_values[1];

  if (s2 > kRankThreshold * std::max(1.0, s1)) {
    Basis2 q;
    if (mode == RetractionMode::PolarFactor) {
      // U V^T = P V diag(1/s) V^T
      const Mat2 inv_sqrt = svd.v * Vec2(1.0 / s1, 1.0 / s2).asDiagonal() * svd.v.transpose();
      q = p * inv_sqrt;
    } else {
      q = svd.u;
    }
    // One Gram-Schmidt pass removes the O(cond^2 eps) error of going through P^T P.
    q.col(0).normalize();
    q.col(1) -= q.col(0).dot(q.col(1)) * q.col(0);
    q.col(1).normalize();
    return {ProjectionMatrix(std::move(q)), false};
  }

  if (engine == nullptr) {
    throw RuntimeError("retract: rank-deficient projection (sigma2 = " + std::to_string(s2) + ")");
  }
  Basis2 q(p.rows(), 2);
  if (s1 > kRankThreshold) {
    q.col(0) = svd.u.col(0);
  } else {
    Vector v(p.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = standard_normal(*engine);
    q.col(0) = v.normalized();
  }
  q.col(1) = random_unit_orthogonal_to(q.col(0), *engine);
  return {ProjectionMatrix(std::move(q)), true};
}

ProjectionMatrix random_orthonormal(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("random_orthonormal: D must be >= 2, got " + std::to_string(dim));
  Engine engine = make_engine(seed);
  Basis2 g(static_cast<Eigen::Index>(dim), 2);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = standard_normal(engine);
  return retract(g, RetractionMode::PolarFactor, &engine).projection;
}

Points2 project(const ProjectionMatrix& p, const RowMatrix& x) {
  if (static_cast<std::size_t>(x.cols()) != p.dim()) {
    throw ValidationError("project: data has " + std::to_string(x.cols()) +
                          " columns, projection expects " + std::to_string(p.dim()));
  }
  return x * p.basis();
}

Vec2 principal_angles(const ProjectionMatrix& p, const ProjectionMatrix& q) {
  if (p.dim() != q.dim()) throw ValidationError("principal_angles: dimension mismatch");
  const Basis2& pb = p.basis();
  const Basis2& qb = q.basis();
  const Mat2 m = pb.transpose() * qb;
  // Left singular vectors of M are the eigenvectors of M M^T.
  const SymmetricEigen2 eig = symmetric_eigen2(m * m.transpose());
  Vec2 angles;
  for (int k = 0; k < 2; ++k) {
    const Vector pk = pb * eig.vectors.col(k);
    const Vector along = qb * (qb.transpose() * pk);
    const double cosine = std::clamp((m.transpose() * eig.vectors.col(k)).norm(), 0.0, 1.0);
    const double sine = std::clamp((pk - along).norm(), 0.0, 1.0);
    angles[k] = std::atan2(sine, cosine);
  }
  if (angles[0] > angles[1]) std::swap(angles[0], angles[1]);
  return angles;
}

Matrix random_projection_preprocess(std::size_t dim_in, std::size_t dim_out, std::uint64_t seed) {
  if (dim_out < 2 || dim_out >= dim_in) {
    throw ValidationError("random projection needs 2 <= D' < D (got D=" + std::to_string(dim_in) +
                          ", D'=" + std::to_string(dim_out) + ")");
  }
  Engine engine = make_engine(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim_out));
  Matrix g(static_cast<Eigen::Index>(dim_in), static_cast<Eigen::Index>(dim_out));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = sd * standard_normal(engine);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  return q;
}

Mat2 rotation2(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  Mat2 r;
  r << std::cos(rad), -std::sin(rad), std::sin(rad), std::cos(rad);
  return r;
}

}  // namespace fpp
