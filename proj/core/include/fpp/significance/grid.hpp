#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpp/optim/fit.hpp"

namespace fpp {

struct GridConfig {
  std::vector<std::size_t> dims{2, 5, 10, 20, 50, 100};
  std::vector<std::size_t> sizes{50, 100, 300, 1000, 3000, 10000};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  double reference_r2 = 0.5;
  /// Template for every cell; batch size is capped at N per cell.
  HyperParams hyperparams = [] {
    HyperParams hp;
    hp.degree = 4;
    hp.learning_rate = 0.01;
    return hp;
  }();
  /// Cells with few batches per epoch get extra epochs so every fit takes at
  /// least this many gradient steps.
  std::size_t min_steps = 2000;
  unsigned threads = 0;
};

/// Training R^2 of fits to pure noise over a (D, N) grid. Rows follow dims,
/// columns follow sizes.
struct GridStudyResult {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> sizes;
  std::size_t trials = 0;
  double reference_r2 = 0.5;
  Matrix mean_r2;
  Matrix sd_r2;
  /// Upper-tail Gaussian p-value of reference_r2 under each cell's null. A
  /// constant null gives 1 when reference_r2 is at or below it, else 0.
  Matrix p_at_reference;
  /// Failed trials per cell; their messages are kept in `errors`.
  Eigen::MatrixXi failures;
  std::vector<std::string> errors;
  std::vector<std::vector<std::vector<double>>> samples;  // [dim][size][trial]
};

GridStudyResult grid_study(const GridConfig& config);

/// Hyperparameters a grid cell with n samples actually uses.
HyperParams grid_cell_hyperparams(const GridConfig& config, std::size_t n, std::uint64_t seed);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fpp
