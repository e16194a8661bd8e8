#include "fpp/models/softmax.hpp"

#include <cmath>
#include <string>

#include "fpp/error.hpp"

namespace fpp {

namespace {

// Row-wise softmax with max subtraction.
Matrix softmax_rows(Matrix logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - top).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

}  // namespace

SoftmaxHead SoftmaxHead::zeros(int classes, int hidden_width) {
  if (classes < 2) throw ValidationError("softmax head needs K >= 2 classes");
  if (hidden_width < 0) throw ValidationError("hidden width must be >= 0");
  SoftmaxHead h;
  h.classes = classes;
  h.hidden_width = hidden_width;
  h.w1 = Matrix::Zero(hidden_width, 2);
  h.b1 = Vector::Zero(hidden_width);
  h.w2 = Matrix::Zero(classes, h.input_width());
  h.b2 = Vector::Zero(classes);
  return h;
}

SoftmaxHead SoftmaxHead::random(int classes, int hidden_width, Engine& engine) {
  SoftmaxHead h = zeros(classes, hidden_width);
  const double gain1 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < h.w1.size(); ++i) h.w1.data()[i] = gain1 * standard_normal(engine);
  const double gain2 = 1.0 / std::sqrt(static_cast<double>(h.input_width()));
  for (Eigen::Index i = 0; i < h.w2.size(); ++i) h.w2.data()[i] = gain2 * standard_normal(engine);
  return h;
}

std::size_t SoftmaxHead::parameter_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

void SoftmaxHead::validate() const {
  if (classes < 2) throw ValidationError("softmax head needs K >= 2 classes");
  if (hidden_width < 0) throw ValidationError("hidden width must be >= 0");
  if (w1.rows() != hidden_width || w1.cols() != 2 || b1.size() != hidden_width ||
      w2.rows() != classes || w2.cols() != input_width() || b2.size() != classes) {
    throw ValidationError("softmax head layer shapes are inconsistent");
  }
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw ValidationError("softmax head has non-finite parameters");
  }
}

Matrix SoftmaxHead::predict(const Points2& y) const {
  Matrix logits;
  if (hidden_width > 0) {
    const Matrix hidden = ((y * w1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
    logits = (hidden * w2.transpose()).rowwise() + b2.transpose();
  } else {
    logits = (y * w2.transpose()).rowwise() + b2.transpose();
  }
  return softmax_rows(std::move(logits));
}

Vector SoftmaxHead::predict(const Vec2& y) const {
  Points2 one(1, 2);
  one.row(0) = y.transpose();
  return predict(one).row(0).transpose();
}

std::vector<int> SoftmaxHead::classify(const Points2& y) const {
  const Matrix p = predict(y);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    p.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

SoftmaxGradient head_gradients(const SoftmaxHead& head, const Points2& y, std::span<const int> labels) {
  const Eigen::Index n = y.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw ValidationError("head_gradients: label count mismatch");
  if (n == 0) throw ValidationError("head_gradients: empty batch");

  Matrix pre;
  Matrix hidden;
  if (head.hidden_width > 0) {
    pre = (y * head.w1.transpose()).rowwise() + head.b1.transpose();
    hidden = pre.cwiseMax(0.0);
  }
  const Matrix layer_in = head.hidden_width > 0 ? hidden : Matrix(y);
  const Matrix logits = (layer_in * head.w2.transpose()).rowwise() + head.b2.transpose();
  Matrix delta = softmax_rows(logits);

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= head.classes) {
      throw ValidationError("label " + std::to_string(label) + " outside 0.." +
                            std::to_string(head.classes - 1));
    }
    loss -= std::log(std::max(delta(i, label), kProbabilityFloor));
    delta(i, label) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  delta *= inv_n;  // dL/dlogits

  SoftmaxGradient g;
  g.loss = loss * inv_n;
  g.parameters = SoftmaxHead::zeros(head.classes, head.hidden_width);
  g.parameters.w2 = delta.transpose() * layer_in;
  g.parameters.b2 = delta.colwise().sum().transpose();
  const Matrix d_in = delta * head.w2;  // n x (H or 2)
  if (head.hidden_width > 0) {
    const Matrix d_pre = d_in.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    g.parameters.w1 = d_pre.transpose() * y;
    g.parameters.b1 = d_pre.colwise().sum().transpose();
    g.inputs = d_pre * head.w1;
  } else {
    g.inputs = d_in;
  }
  return g;
}

}  // namespace fpp
