#include "fpp/data/dataset.hpp"

#include <cmath>
#include <utility>

#include "fpp/error.hpp"

namespace fpp {

Response Response::continuous(std::string name, Vector values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("response '" + name + "' has a non-finite value at row " +
                            std::to_string(i));
    }
  }
  Response r;
  r.name_ = std::move(name);
  r.kind_ = ResponseKind::Continuous;
  r.values_ = std::move(values);
  return r;
}

Response Response::categorical(std::string name, std::vector<int> labels, int class_count,
                               std::vector<std::string> class_names) {
  if (class_count < 2) {
    throw ValidationError("categorical response '" + name + "' needs at least 2 classes, got " +
                          std::to_string(class_count));
  }
  if (!class_names.empty() && static_cast<int>(class_names.size()) != class_count) {
    throw ValidationError("categorical response '" + name + "': class name count mismatch");
  }
  Response r;
  r.name_ = std::move(name);
  r.kind_ = ResponseKind::Categorical;
  r.values_.resize(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw ValidationError("categorical response '" + r.name_ + "': label " +
                            std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside 0.." + std::to_string(class_count - 1));
    }
    r.values_[static_cast<Eigen::Index>(i)] = labels[i];
  }
  r.labels_ = std::move(labels);
  r.class_count_ = class_count;
  r.class_names_ = std::move(class_names);
  return r;
}

Response Response::take(const std::vector<std::size_t>& order) const {
  Response r = *this;
  r.values_.resize(static_cast<Eigen::Index>(order.size()));
  if (is_categorical()) r.labels_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    r.values_[static_cast<Eigen::Index>(i)] = values_[static_cast<Eigen::Index>(order[i])];
    if (is_categorical()) r.labels_[i] = labels_[order[i]];
  }
  return r;
}

Response Response::with_values(Vector values) const {
  if (is_categorical()) throw ValidationError("with_values: response '" + name_ + "' is categorical");
  return continuous(name_, std::move(values));
}

Dataset::Dataset(RowMatrix features, std::vector<Response> responses,
                 std::vector<std::string> column_names)
    : Dataset(std::make_shared<const RowMatrix>(std::move(features)), std::move(responses),
              std::move(column_names)) {}

Dataset::Dataset(std::shared_ptr<const RowMatrix> features, std::vector<Response> responses,
                 std::vector<std::string> column_names)
    : features_(std::move(features)),
      responses_(std::move(responses)),
      column_names_(std::move(column_names)) {
  validate();
}

void Dataset::validate() const {
  if (!features_ || features_->rows() < 1) throw ValidationError("empty dataset: N must be >= 1");
  if (features_->cols() < 1) throw ValidationError("dataset needs at least one feature column");
  if (!column_names_.empty() && column_names_.size() != dim()) {
    throw ValidationError("column name count does not match feature dimension");
  }
  for (const auto& r : responses_) {
    if (r.size() != sample_count()) {
      throw ValidationError("response '" + r.name() + "' has " + std::to_string(r.size()) +
                            " values, expected " + std::to_string(sample_count()));
    }
  }
}

const Response& Dataset::response(std::size_t index) const {
  if (index >= responses_.size()) {
    throw ValidationError("response index " + std::to_string(index) + " out of range (L=" +
                          std::to_string(responses_.size()) + ")");
  }
  return responses_[index];
}

std::string Dataset::column_name(std::size_t j) const {
  if (j < column_names_.size()) return column_names_[j];
  return "x" + std::to_string(j);
}

bool Dataset::all_continuous() const {
  for (const auto& r : responses_) {
    if (r.is_categorical()) return false;
  }
  return true;
}

Dataset Dataset::take_rows(const std::vector<std::size_t>& rows) const {
  RowMatrix sub(static_cast<Eigen::Index>(rows.size()), features_->cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = features_->row(static_cast<Eigen::Index>(rows[i]));
  }
  std::vector<Response> subset;
  subset.reserve(responses_.size());
  for (const auto& r : responses_) subset.push_back(r.take(rows));
  Dataset out(std::move(sub), std::move(subset), column_names_);
  out.meta_ = meta_;
  return out;
}

Dataset Dataset::with_responses(std::vector<Response> responses) const {
  Dataset out(features_, std::move(responses), column_names_);
  out.meta_ = meta_;
  return out;
}

}  // namespace fpp
