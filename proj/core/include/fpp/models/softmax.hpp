#pragma once

#include <span>

#include "fpp/random.hpp"
#include "fpp/types.hpp"

namespace fpp {

/// Floor applied to probabilities before taking logs in cross-entropy.
inline constexpr double kProbabilityFloor = 1e-12;

/// Softmax classifier on the embedded plane with an optional rectifier layer:
///   p = softmax(W2 relu(W1 y + b1) + b2)      (hidden_width > 0)
///   p = softmax(W2 y + b2)                    (hidden_width == 0)
struct SoftmaxHead {
  int classes = 2;
  int hidden_width = 16;
  Matrix w1;  // H x 2
  Vector b1;  // H
  Matrix w2;  // K x (H or 2)
  Vector b2;  // K

  static SoftmaxHead zeros(int classes, int hidden_width);
  /// Gaussian weights with standard deviation 1/sqrt(fan_in), zero biases.
  static SoftmaxHead random(int classes, int hidden_width, Engine& engine);

  /// Probability vector for one point.
  Vector predict(const Vec2& y) const;
  /// n x K probabilities.
  Matrix predict(const Points2& y) const;
  /// Argmax class per point.
  std::vector<int> classify(const Points2& y) const;

  int input_width() const { return hidden_width > 0 ? hidden_width : 2; }
  std::size_t parameter_count() const;
  void validate() const;
};

struct SoftmaxGradient {
  double loss = 0.0;  // batch mean cross-entropy
  SoftmaxHead parameters;  // gradient, shaped like the head
  Points2 inputs;  // dL/dy, n x 2
};

/// Batch cross-entropy and its gradients by backpropagation. The rectifier
/// derivative at exactly 0 is taken as 0.
SoftmaxGradient head_gradients(const SoftmaxHead& head, const Points2& y, std::span<const int> labels);

}  // namespace fpp
