#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpp/data/dataset.hpp"
#include "fpp/data/transform.hpp"
#include "fpp/models/polynomial.hpp"
#include "fpp/models/softmax.hpp"
#include "fpp/optim/stiefel.hpp"

namespace fpp {

enum class OptimizerKind {
  Sgd,   ///< plain mini-batch gradient steps
  Adam,  ///< adaptive moments (beta1 0.9, beta2 0.999, eps 1e-8)
};

enum class LearningRateSchedule {
  Constant,  ///< the same step size in every epoch
  Cosine,    ///< lr * (1 + cos(pi * epoch / epochs)) / 2
};

struct HyperParams {
  double learning_rate = 0.1;
  std::size_t batch_size = 50;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  /// Degree of every polynomial head unless `response_degrees` overrides it.
  int degree = 3;
  /// Per-response degree, indexed like the dataset responses; empty = `degree`.
  std::vector<int> response_degrees;
  /// Rectifier layer width of softmax heads; 0 = linear softmax.
  int hidden_width = 16;
  bool standardize = true;
  RetractionMode retraction = RetractionMode::PolarFactor;
  OptimizerKind optimizer = OptimizerKind::Adam;
  LearningRateSchedule schedule = LearningRateSchedule::Cosine;
  /// Random-projection pre-process to this many dimensions; 0 disables it.
  std::size_t pre_dim = 0;
  /// After the last epoch, replace each polynomial head by the exact
  /// least-squares head for the final projection of the training rows.
  bool polish_heads = true;
  /// A batch loss above divergence_factor x the first batch loss (or a
  /// non-finite one) halves the learning rate and restarts the epoch.
  double divergence_factor = 1e6;
  int max_lr_halvings = 10;

  /// Throws ValidationError on non-positive values, batch > n, or a bad pre_dim.
  void validate(std::size_t n_train, std::size_t dim, std::size_t response_count) const;
  int degree_for(std::size_t response) const;
  /// Scheduled step size of `epoch` for a base rate `lr`.
  double rate_at(double lr, std::size_t epoch) const;
};

using Head = std::variant<PolynomialHead, SoftmaxHead>;

/// R^2 for a continuous response, accuracy for a categorical one.
struct ResponseScore {
  std::string name;
  ResponseKind kind = ResponseKind::Continuous;
  double value = 0.0;
};

struct Evaluation {
  /// Equal-weight mean of the per-response losses (MSE in standardized
  /// units, cross-entropy).
  double loss = 0.0;
  std::vector<double> response_losses;
  std::vector<ResponseScore> scores;
};

struct FitResult {
  /// Map acting on the working features (after scaling and pre-projection).
  ProjectionMatrix projection;
  /// D x D' random pre-projection, when enabled.
  std::optional<Matrix> pre_projection{};
  /// D x 2 map from scaled input features: pre_projection * projection.
  ProjectionMatrix composite;
  /// Statistics of the training rows; absent when standardize is off.
  std::optional<ScalingInfo> scaling{};
  std::vector<Head> heads{};
  std::vector<std::string> response_names{};
  std::vector<ResponseKind> response_kinds{};

  std::vector<double> loss_history{};  // per-epoch mean training batch loss
  double final_train_loss = 0.0;     // objective on all training rows at the end
  std::vector<double> final_response_losses{};
  std::vector<ResponseScore> train_scores{};
  std::vector<ResponseScore> test_scores{};  // filled by fit_with_holdout
  std::optional<double> test_loss{};

  std::size_t epochs_run = 0;
  std::uint64_t seed = 0;
  HyperParams hyperparams{};
  double final_learning_rate = 0.0;
  int learning_rate_halvings = 0;
  std::size_t retraction_recoveries = 0;
  /// Largest ||P^T P - I||_F seen right after any retraction.
  double max_orthonormality_error = 0.0;

  /// Scaled (and pre-projected) features in the working space of `projection`.
  RowMatrix working_features(const RowMatrix& raw) const;
  /// 2-D embedding of raw feature rows.
  Points2 embed(const RowMatrix& raw) const;
};

/// Mini-batch projected gradient descent over (P, heads) minimizing the
/// equal-weight mean of per-response losses; P is retracted after every step.
FitResult fit(const Dataset& data, const HyperParams& hp);

/// Losses and scores of a fitted model on any dataset with the same layout.
Evaluation evaluate(const FitResult& result, const Dataset& data);

struct HoldoutFit {
  FitResult result;
  Split split;
};

/// Seed of the train/test split fit_with_holdout() derives from a run seed.
std::uint64_t holdout_split_seed(std::uint64_t run_seed);
/// Seed of the random pre-projection fit() derives from a run seed.
std::uint64_t pre_projection_seed(std::uint64_t run_seed);

/// Split (seeded from hp.seed), fit on train, evaluate on test.
HoldoutFit fit_with_holdout(const Dataset& data, const HyperParams& hp, double test_fraction);

struct ObjectiveGradient {
  double value = 0.0;
  std::vector<double> response_losses;
  Basis2 projection;        // dJ/dP
  std::vector<Head> heads;  // dJ/dtheta, shaped like each head
};

/// J(P, theta) = (1/L) sum_l loss_l(g_l(X P), response_l) and its exact
/// gradient, for any D x 2 matrix P (no orthonormality needed).
ObjectiveGradient objective_gradient(const RowMatrix& x, const Basis2& p, const std::vector<Head>& heads,
                                     const std::vector<Response>& responses);

}  // namespace fpp
