#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fpp/data/synth.hpp"
#include "fpp/error.hpp"
#include "fpp/random.hpp"
#include "fpp/significance/grid.hpp"
#include "fpp/significance/null.hpp"

namespace fpp {
namespace {

NullDistribution ladder(std::size_t t, MetricKind metric = MetricKind::Loss) {
  NullDistribution n;
  n.metric = metric;
  for (std::size_t i = 1; i <= t; ++i) n.samples.push_back(static_cast<double>(i));
  return n;
}

// Two-point null with mean 10 and sample standard deviation 2.
NullDistribution known_moments(MetricKind metric) {
  NullDistribution n;
  n.metric = metric;
  const double half = 2.0 * std::sqrt(0.5);
  n.samples = {10.0 - half, 10.0 + half};
  return n;
}

TEST(PValue, EmpiricalExamples) {
  const NullDistribution n = ladder(300);
  EXPECT_DOUBLE_EQ(p_value_empirical(0.5, n), 1.0 / 301.0);
  EXPECT_NEAR(p_value_empirical(0.5, n), 0.00332, 1e-5);
  EXPECT_DOUBLE_EQ(p_value_empirical(1000.0, n), 1.0);
  EXPECT_NEAR(p_value_empirical(150.5, n), 0.5, 0.01);
  const NullDistribution r2 = ladder(300, MetricKind::R2);
  EXPECT_DOUBLE_EQ(p_value_empirical(1000.0, r2), 1.0 / 301.0);
  EXPECT_DOUBLE_EQ(p_value_empirical(0.0, r2), 1.0);
}

TEST(PValue, EmpiricalMonotone) {
  const NullDistribution n = ladder(50);
  double prev = 0.0;
  for (double obs = -1.0; obs < 55.0; obs += 0.25) {
    const double p = p_value_empirical(obs, n);
    EXPECT_GE(p, prev);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
    prev = p;
  }
}

TEST(PValue, ParametricExamples) {
  const NullDistribution n = known_moments(MetricKind::Loss);
  EXPECT_DOUBLE_EQ(n.mean(), 10.0);
  EXPECT_NEAR(n.stddev(), 2.0, 1e-15);
  EXPECT_NEAR(p_value_parametric(10.0, n), 0.5, 1e-15);
  EXPECT_NEAR(p_value_parametric(0.0, n), 2.866515718791939e-07, 1e-18);
  EXPECT_NEAR(p_value_parametric(8.0, n), 0.15865525393145707, 1e-12);
  const NullDistribution r = known_moments(MetricKind::R2);
  EXPECT_NEAR(p_value_parametric(12.0, r), 0.15865525393145707, 1e-12);
  EXPECT_NEAR(p_value_parametric(8.0, r), 1.0 - 0.15865525393145707, 1e-12);
}

TEST(PValue, ParametricStrictlyMonotone) {
  const NullDistribution n = known_moments(MetricKind::Loss);
  double prev = -1.0;
  for (double obs = 2.0; obs < 18.0; obs += 0.1) {
    const double p = p_value_parametric(obs, n);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(PValue, ZeroVarianceAndTooFewTrials) {
  NullDistribution flat;
  flat.samples = {3.0, 3.0, 3.0};
  EXPECT_THROW(p_value_parametric(1.0, flat), ValidationError);
  NullDistribution one;
  one.samples = {3.0};
  EXPECT_THROW(p_value_empirical(1.0, one), ValidationError);
}

TEST(PValue, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_cdf(-10.0), 7.619853024160527e-24, 1e-36);
}

TEST(PValue, ReportCarriesBoth) {
  const SignificanceReport r = significance_report(0.5, ladder(300), 0.01);
  EXPECT_DOUBLE_EQ(r.p_empirical, 1.0 / 301.0);
  // Ladder 1..300: mean 150.5, sample variance 300 * 301 / 12.
  const double z = (0.5 - 150.5) / std::sqrt(300.0 * 301.0 / 12.0);
  EXPECT_NEAR(r.p_parametric, 0.5 * std::erfc(-z / std::sqrt(2.0)), 1e-12);
  EXPECT_EQ(r.verdict_threshold, 0.01);
  EXPECT_EQ(r.null.samples.size(), 300u);
}

HyperParams tiny() {
  HyperParams hp;
  hp.epochs = 5;
  hp.batch_size = 20;
  hp.degree = 2;
  return hp;
}

TEST(NullDistribution, ReproducibleAndThreadIndependent) {
  const Dataset d = synth_circle(120, 4, 0.1, 3);
  const NullDistribution a = null_distribution(d, tiny(), 12, 99, 1);
  const NullDistribution b = null_distribution(d, tiny(), 12, 99, 1);
  const NullDistribution c = null_distribution(d, tiny(), 12, 99, 4);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.samples, c.samples);
  EXPECT_EQ(a.r2_samples, c.r2_samples);
  ASSERT_EQ(a.trial_seeds.size(), 12u);
  for (std::size_t t = 0; t < 12; ++t) EXPECT_EQ(a.trial_seeds[t], derive_seed(99, t));
  for (double s : a.samples) {
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GE(s, 0.0);
  }
  EXPECT_NE(null_distribution(d, tiny(), 12, 100, 1).samples, a.samples);
  EXPECT_EQ(a.as_r2().metric, MetricKind::R2);
  EXPECT_THROW(null_distribution(d, tiny(), 1, 99, 1), ValidationError);
}

TEST(NullDistribution, CategoricalHasNoR2) {
  const Dataset d = synth_blobs(90, 3, 3, 4.0, 1);
  const NullDistribution n = null_distribution(d, tiny(), 3, 1, 1);
  EXPECT_TRUE(n.r2_samples.empty());
  EXPECT_THROW(n.as_r2(), ValidationError);
}

TEST(NullDistribution, EmpiricalPUniformUnderNull) {
  HyperParams hp;
  hp.epochs = 3;
  hp.batch_size = 30;
  hp.degree = 1;
  const std::size_t reps = 200;
  std::vector<double> p(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const Dataset d = synth_noise(30, 3, 1000 + r);
    HyperParams obs = hp;
    obs.seed = derive_seed(r, 7);
    const double observed = fit(d, obs).final_train_loss;
    p[r] = p_value_empirical(observed, null_distribution(d, hp, 99, derive_seed(r, 8), 1));
  }
  std::sort(p.begin(), p.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double hi = static_cast<double>(i + 1) / reps;
    const double lo = static_cast<double>(i) / reps;
    ks = std::max({ks, hi - p[i], p[i] - lo});
  }
  // One-sample KS critical value at the 1% level.
  EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(reps)));
}

TEST(NullDistribution, NoiseObservationIsTypical) {
  int inside = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Dataset d = synth_noise(60, 4, s);
    HyperParams hp = tiny();
    hp.seed = s;
    const double p = p_value_empirical(fit(d, hp).final_train_loss, null_distribution(d, hp, 40, s + 50, 1));
    inside += p >= 0.05 && p <= 0.95;
  }
  EXPECT_GE(inside, 7);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {1, 3, 2, 4}), 0.8, 1e-15);
  // Ties take average ranks: (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
  EXPECT_NEAR(spearman({1, 2, 2, 3}, {1, 2, 3, 4}), 4.5 / std::sqrt(4.5 * 5.0), 1e-15);
  EXPECT_THROW(spearman({1}, {1}), ValidationError);
}

TEST(Grid, SingleCell) {
  GridConfig c;
  c.dims = {3};
  c.sizes = {40};
  c.trials = 4;
  c.min_steps = 50;
  c.threads = 1;
  const GridStudyResult g = grid_study(c);
  EXPECT_EQ(g.mean_r2.rows(), 1);
  EXPECT_EQ(g.mean_r2.cols(), 1);
  EXPECT_EQ(g.p_at_reference.rows(), 1);
  EXPECT_TRUE(std::isfinite(g.mean_r2(0, 0)));
  EXPECT_TRUE(std::isfinite(g.p_at_reference(0, 0)));
  EXPECT_EQ(g.samples[0][0].size(), 4u);
  EXPECT_EQ(g.failures(0, 0), 0);
  c.threads = 3;
  EXPECT_EQ(grid_study(c).samples, g.samples);
}

TEST(Grid, CellHyperParams) {
  GridConfig c;
  const HyperParams hp = grid_cell_hyperparams(c, 30, 5);
  EXPECT_EQ(hp.batch_size, 30u);
  EXPECT_EQ(hp.epochs, 2000u);
  EXPECT_EQ(hp.degree, 4);
  const HyperParams big = grid_cell_hyperparams(c, 10000, 5);
  EXPECT_EQ(big.batch_size, 50u);
  EXPECT_EQ(big.epochs, 50u);
}

TEST(Grid, Validation) {
  GridConfig c;
  c.trials = 1;
  EXPECT_THROW(grid_study(c), ValidationError);
  c = {};
  c.dims = {};
  EXPECT_THROW(grid_study(c), ValidationError);
  c = {};
  c.dims = {1};
  EXPECT_THROW(grid_study(c), ValidationError);
}

TEST(Overfit, Verdicts) {
  EXPECT_FALSE(assess_overfit(0.9, 0.85, 0.01).suspect);
  EXPECT_STREQ(assess_overfit(0.9, 0.85, 0.01).verdict(), "trustworthy");
  const OverfitAssessment p = assess_overfit(0.9, 0.85, 0.2);
  EXPECT_TRUE(p.suspect);
  EXPECT_STREQ(p.verdict(), "suspect");
  EXPECT_FALSE(p.reason.empty());
  EXPECT_TRUE(assess_overfit(0.9, 0.3, 0.001).suspect);
  EXPECT_TRUE(assess_overfit(0.5, -0.04, 0.001).suspect);
}

TEST(Overfit, MeanScore) {
  std::vector<ResponseScore> s{{"a", ResponseKind::Continuous, 0.5},
                               {"b", ResponseKind::Continuous, 0.7},
                               {"c", ResponseKind::Categorical, 0.1}};
  EXPECT_DOUBLE_EQ(mean_score(s), 0.6);
  s.resize(1);
  s[0].kind = ResponseKind::Categorical;
  EXPECT_DOUBLE_EQ(mean_score(s), 0.5);
}

}  // namespace
}  // namespace fpp
