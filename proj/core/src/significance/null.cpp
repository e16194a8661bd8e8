#include "fpp/significance/null.hpp"

#include <cmath>
#include <numeric>

#include "fpp/data/transform.hpp"
#include "fpp/error.hpp"
#include "fpp/parallel.hpp"
#include "fpp/random.hpp"

namespace fpp {

NullDistribution NullDistribution::as_r2() const {
  if (r2_samples.empty()) throw ValidationError("null distribution has no R^2 samples");
  NullDistribution out = *this;
  out.metric = MetricKind::R2;
  out.samples = r2_samples;
  return out;
}

double NullDistribution::mean() const {
  if (samples.empty()) throw ValidationError("null distribution is empty");
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double NullDistribution::stddev() const {
  if (samples.size() < 2) throw ValidationError("null distribution needs T >= 2");
  const double m = mean();
  double ss = 0.0;
  for (double s : samples) ss += (s - m) * (s - m);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

double mean_score(const std::vector<ResponseScore>& scores) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : scores) {
    if (s.kind == ResponseKind::Continuous) {
      total += s.value;
      ++count;
    }
  }
  if (count == 0) {
    for (const auto& s : scores) total += s.value;
    count = scores.size();
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

NullDistribution null_distribution(const Dataset& data, const HyperParams& hp, std::size_t trials,
                                   std::uint64_t seed, unsigned threads) {
  if (trials < 2) throw ValidationError("null distribution needs T >= 2 trials, got " + std::to_string(trials));
  hp.validate(data.sample_count(), data.dim(), data.response_count());

  NullDistribution null;
  null.metric = MetricKind::Loss;
  null.hyperparams = hp;
  null.samples.assign(trials, 0.0);
  null.trial_seeds.resize(trials);
  for (std::size_t t = 0; t < trials; ++t) null.trial_seeds[t] = derive_seed(seed, t);
  const bool continuous = data.all_continuous();
  std::vector<double> r2(trials, 0.0);

  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = null.trial_seeds[t];
    try {
      Dataset shuffled = data;
      for (std::size_t l = 0; l < data.response_count(); ++l) {
        shuffled = shuffle_response(shuffled, l, derive_seed(trial_seed, l));
      }
      HyperParams trial_hp = hp;
      trial_hp.seed = derive_seed(trial_seed, data.response_count() + 1);
      const FitResult fitted = fit(shuffled, trial_hp);
      null.samples[t] = fitted.final_train_loss;
      if (continuous) r2[t] = mean_score(fitted.train_scores);
    } catch (const ValidationError& e) {
      throw ValidationError("null trial " + std::to_string(t) + ": " + e.what());
    } catch (const std::exception& e) {
      throw RuntimeError("null trial " + std::to_string(t) + ": " + e.what());
    }
  });
  if (continuous) null.r2_samples = std::move(r2);
  return null;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double p_value_empirical(double observed, const NullDistribution& null) {
  if (null.samples.size() < 2) throw ValidationError("null distribution needs T >= 2");
  std::size_t as_strong = 0;
  for (double s : null.samples) {
    const bool stronger = null.metric == MetricKind::Loss ? s <= observed : s >= observed;
    as_strong += stronger ? 1 : 0;
  }
  return static_cast<double>(1 + as_strong) / static_cast<double>(null.samples.size() + 1);
}

double p_value_parametric(double observed, const NullDistribution& null) {
  const double sd = null.stddev();
  if (!(sd > 0.0)) throw ValidationError("null distribution has zero variance");
  const double z = (observed - null.mean()) / sd;
  return null.metric == MetricKind::Loss ? normal_cdf(z) : normal_cdf(-z);
}

SignificanceReport significance_report(double observed, NullDistribution null, double threshold) {
  SignificanceReport report;
  report.observed = observed;
  report.p_empirical = p_value_empirical(observed, null);
  report.p_parametric = p_value_parametric(observed, null);
  report.verdict_threshold = threshold;
  report.null = std::move(null);
  return report;
}

OverfitAssessment assess_overfit(double train_score, double test_score, double p_value, double threshold) {
  OverfitAssessment a{train_score, test_score, p_value, false, {}};
  if (!(p_value <= threshold)) {
    a.suspect = true;
    a.reason = "p-value above threshold";
  }
  const bool dropped = !std::isfinite(test_score) ||
                       (train_score > 0.0 && (train_score - test_score) > 0.5 * std::abs(train_score));
  if (dropped) {
    a.suspect = true;
    a.reason += a.reason.empty() ? "" : "; ";
    a.reason += "test score more than 50% below train score";
  }
  return a;
}

}  // namespace fpp
