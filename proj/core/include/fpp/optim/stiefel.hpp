#pragma once

#include <cstdint>
#include <optional>

#include "fpp/random.hpp"
#include "fpp/types.hpp"

namespace fpp {

/// Orthonormality tolerance, ||P^T P - I||_F, enforced on construction.
inline constexpr double kOrthonormalTolerance = 1e-8;

/// D x 2 matrix with orthonormal columns; embeddings are y = P^T x (Y = X P).
class ProjectionMatrix {
 public:
  /// Throws ValidationError unless `basis` is orthonormal within tolerance.
  explicit ProjectionMatrix(Basis2 basis);

  const Basis2& basis() const { return basis_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.rows()); }
  /// ||P^T P - I||_F
  double orthonormality_error() const;

 private:
  Basis2 basis_;
};

double orthonormality_error(const Basis2& basis);

enum class RetractionMode {
  PolarFactor,  ///< U V^T, the nearest orthonormal matrix in Frobenius norm
  PaperU,       ///< U alone, left singular vectors ordered by singular value
};

/// Closed-form eigendecomposition of a symmetric 2x2 matrix, eigenvalues
/// descending, eigenvectors as columns (a rotation).
struct SymmetricEigen2 {
  Vec2 values;
  Mat2 vectors;
};
SymmetricEigen2 symmetric_eigen2(const Mat2& m);

/// Thin SVD of a D x 2 matrix from the eigendecomposition of P^T P.
struct ThinSvd2 {
  Basis2 u;
  Vec2 singular_values;
  Mat2 v;
};
ThinSvd2 thin_svd2(const Basis2& p);

struct Retraction {
  ProjectionMatrix projection;
  /// sigma_2 fell below the rank threshold and the weak direction was
  /// replaced by a random vector orthogonalised against the surviving one.
  bool recovered = false;
};

/// Maps an arbitrary D x 2 matrix back onto the Stiefel manifold. `engine`
/// supplies the replacement direction for rank-deficient input; without one a
/// rank-deficient matrix raises RuntimeError.
Retraction retract(const Basis2& p, RetractionMode mode = RetractionMode::PolarFactor,
                   Engine* engine = nullptr);

/// Orthonormal basis of a uniformly random 2-D subspace of R^dim.
ProjectionMatrix random_orthonormal(std::size_t dim, std::uint64_t seed);

/// Y = X P for n x D features.
Points2 project(const ProjectionMatrix& p, const RowMatrix& x);

/// Principal angles (theta1 <= theta2, radians) between span(P) and span(Q).
/// Cosines come from the singular values of P^T Q; angles are recovered with
/// atan2(sin, cos) so nearly identical spans resolve to ~1e-16, not ~1e-8.
Vec2 principal_angles(const ProjectionMatrix& p, const ProjectionMatrix& q);

/// D x D' matrix with N(0, 1/D') entries whose columns are then orthonormalised.
Matrix random_projection_preprocess(std::size_t dim_in, std::size_t dim_out, std::uint64_t seed);

/// 2x2 counter-clockwise rotation by `degrees`.
Mat2 rotation2(double degrees);

}  // namespace fpp
