#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpp/types.hpp"

namespace fpp {

enum class ResponseKind { Continuous, Categorical };

/// One per-sample target. Continuous responses keep real values; categorical
/// responses keep label indices 0..K-1 (stored exactly as doubles) plus the
/// original label text when it came from a file.
class Response {
 public:
  static Response continuous(std::string name, Vector values);
  static Response categorical(std::string name, std::vector<int> labels, int class_count,
                              std::vector<std::string> class_names = {});

  const std::string& name() const { return name_; }
  ResponseKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == ResponseKind::Categorical; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  /// Real values; for categorical responses these are the label indices.
  const Vector& values() const { return values_; }
  /// Label indices; empty for continuous responses.
  const std::vector<int>& labels() const { return labels_; }
  int class_count() const { return class_count_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Same kind/name with rows reordered: result[i] = this[order[i]].
  Response take(const std::vector<std::size_t>& order) const;
  /// Continuous only: replaces the values, keeping the name.
  Response with_values(Vector values) const;

 private:
  std::string name_;
  ResponseKind kind_ = ResponseKind::Continuous;
  Vector values_;
  std::vector<int> labels_;
  int class_count_ = 0;
  std::vector<std::string> class_names_;
};

/// Generator bookkeeping: the hidden plane a synthetic response lives in.
struct SyntheticMeta {
  std::string generator;
  Basis2 ground_truth;  // D x 2, orthonormal columns
  std::vector<std::pair<std::string, double>> parameters;
};

/// N x D features plus L responses. Features sit behind a shared pointer to
/// const so datasets derived by response shuffling or relabelling share them.
class Dataset {
 public:
  Dataset(RowMatrix features, std::vector<Response> responses,
          std::vector<std::string> column_names = {});
  Dataset(std::shared_ptr<const RowMatrix> features, std::vector<Response> responses,
          std::vector<std::string> column_names = {});

  const RowMatrix& features() const { return *features_; }
  const std::shared_ptr<const RowMatrix>& shared_features() const { return features_; }
  const std::vector<Response>& responses() const { return responses_; }
  const Response& response(std::size_t index) const;

  std::size_t sample_count() const { return static_cast<std::size_t>(features_->rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_->cols()); }
  std::size_t response_count() const { return responses_.size(); }

  /// Empty when the source had no header.
  const std::vector<std::string>& column_names() const { return column_names_; }
  /// Name of column j, falling back to "x<j>".
  std::string column_name(std::size_t j) const;

  const std::optional<SyntheticMeta>& meta() const { return meta_; }
  void set_meta(SyntheticMeta meta) { meta_ = std::move(meta); }

  bool all_continuous() const;

  /// Row subset with every response subset the same way.
  Dataset take_rows(const std::vector<std::size_t>& rows) const;
  /// Same features, different responses.
  Dataset with_responses(std::vector<Response> responses) const;

 private:
  void validate() const;

  std::shared_ptr<const RowMatrix> features_;
  std::vector<Response> responses_;
  std::vector<std::string> column_names_;
  std::optional<SyntheticMeta> meta_;
};

}  // namespace fpp
