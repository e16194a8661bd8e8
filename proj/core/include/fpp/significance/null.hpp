#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpp/data/dataset.hpp"
#include "fpp/optim/fit.hpp"

namespace fpp {

/// Loss: lower is a stronger pattern. R2: higher is a stronger pattern.
enum class MetricKind { Loss, R2 };

struct NullDistribution {
  MetricKind metric = MetricKind::Loss;
  std::vector<double> samples;
  std::vector<std::uint64_t> trial_seeds;
  HyperParams hyperparams;
  /// Mean training R^2 per trial; empty when any response is categorical.
  std::vector<double> r2_samples;

  /// The same trials viewed through the R^2 metric.
  NullDistribution as_r2() const;
  double mean() const;
  /// Sample standard deviation (T - 1 denominator).
  double stddev() const;
};

/// Refits projection and heads from scratch on `trials` copies of the data in
/// which every response is independently shuffled. Trial t uses
/// derive_seed(seed, t); trials run on up to `threads` workers and the result
/// does not depend on the thread count.
NullDistribution null_distribution(const Dataset& data, const HyperParams& hp, std::size_t trials,
                                   std::uint64_t seed, unsigned threads = 0);

/// (1 + #{null samples at least as strong as observed}) / (T + 1).
double p_value_empirical(double observed, const NullDistribution& null);

/// Gaussian tail from the null mean and sample standard deviation: lower tail
/// for losses, upper tail for R^2. Throws when the null has zero variance.
double p_value_parametric(double observed, const NullDistribution& null);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

struct SignificanceReport {
  double observed = 0.0;
  NullDistribution null;
  double p_empirical = 1.0;
  double p_parametric = 1.0;
  double verdict_threshold = 0.05;
};

SignificanceReport significance_report(double observed, NullDistribution null, double threshold = 0.05);

/// Train/test + p-value check for spurious projections. Suspect when
/// p > threshold or the test score falls more than 50% below the train score.
struct OverfitAssessment {
  double train_score = 0.0;
  double test_score = 0.0;
  double p_value = 1.0;
  bool suspect = false;
  std::string reason;
  const char* verdict() const { return suspect ? "suspect" : "trustworthy"; }
};

OverfitAssessment assess_overfit(double train_score, double test_score, double p_value,
                                 double threshold = 0.05);

/// Mean of the continuous-response scores (R^2), or of all scores when mixed.
double mean_score(const std::vector<ResponseScore>& scores);

}  // namespace fpp
