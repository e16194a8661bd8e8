#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fpp/data/dataset.hpp"

namespace fpp {

/// Per-column affine map applied by standardize(); `scale` is strictly positive.
struct ScalingInfo {
  Vector feature_mean;
  Vector feature_scale;
  /// Indexed like Dataset::responses(); unset for categorical responses.
  std::vector<std::optional<std::pair<double, double>>> response_mean_scale;

  /// (x - mean) / scale, row by row.
  RowMatrix apply(const RowMatrix& raw) const;
  RowMatrix invert(const RowMatrix& standardized) const;
  double apply_response(std::size_t index, double raw) const;
  double invert_response(std::size_t index, double standardized) const;
};

/// Zero mean and unit population standard deviation per feature column and per
/// continuous response. Zero-variance columns get scale 1 (so they become 0).
std::pair<Dataset, ScalingInfo> standardize(const Dataset& data);
/// Moments only, without producing the standardized copy.
ScalingInfo compute_scaling(const Dataset& data);
/// Applies a previously computed scaling (e.g. train statistics to test rows).
Dataset apply_scaling(const Dataset& data, const ScalingInfo& scaling);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  bool stratified = false;
  /// A categorical response had a class with < 2 members, so the split fell
  /// back to an unstratified shuffle.
  bool stratification_fallback = false;
};

/// Train gets ceil(N * (1 - test_fraction)) rows, test the rest. Stratified on
/// the first categorical response when every class has >= 2 members.
Split train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Number of training rows train_test_split() will produce.
std::size_t train_size_for(std::size_t n, double test_fraction);

/// Uniform random permutation of one response's values; features are shared.
Dataset shuffle_response(const Dataset& data, std::size_t response_index, std::uint64_t seed);

/// Uniform permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace fpp
