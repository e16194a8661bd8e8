#include "fpp/models/loss.hpp"

#include <cmath>
#include <string>

#include "fpp/error.hpp"
#include "fpp/models/softmax.hpp"

namespace fpp {

LossValue mse_loss(const Eigen::Ref<const Vector>& predictions, const Eigen::Ref<const Vector>& targets) {
  if (predictions.size() != targets.size()) {
    throw ValidationError("mse_loss: length mismatch (" + std::to_string(predictions.size()) +
                          " vs " + std::to_string(targets.size()) + ")");
  }
  if (predictions.size() == 0) throw ValidationError("mse_loss: empty input");
  LossValue out;
  out.per_sample = predictions - targets;
  out.value = out.per_sample.squaredNorm() / static_cast<double>(predictions.size());
  return out;
}

double r2_score(const Eigen::Ref<const Vector>& predictions, const Eigen::Ref<const Vector>& targets) {
  if (predictions.size() != targets.size()) throw ValidationError("r2_score: length mismatch");
  if (targets.size() < 2) throw ValidationError("r2_score: need at least 2 samples");
  const double mean = targets.mean();
  const double ss_tot = (targets.array() - mean).square().sum();
  if (!(ss_tot > 0.0)) throw ValidationError("r2_score: targets have zero variance");
  const double ss_res = (predictions - targets).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

LossValue cross_entropy_loss(const Matrix& probabilities, std::span<const int> labels) {
  const Eigen::Index n = probabilities.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw ValidationError("cross_entropy_loss: length mismatch");
  if (n == 0) throw ValidationError("cross_entropy_loss: empty input");
  LossValue out;
  out.per_sample.resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(probabilities.row(i).sum() - 1.0) > 1e-8) {
      throw ValidationError("cross_entropy_loss: row " + std::to_string(i) + " does not sum to 1");
    }
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= probabilities.cols()) {
      throw ValidationError("cross_entropy_loss: label " + std::to_string(label) + " >= K=" +
                            std::to_string(probabilities.cols()));
    }
    const double p = probabilities(i, label);
    out.per_sample[i] = p;
    total -= std::log(std::max(p, kProbabilityFloor));
  }
  out.value = total / static_cast<double>(n);
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) throw ValidationError("accuracy: length mismatch");
  if (labels.empty()) throw ValidationError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace fpp
