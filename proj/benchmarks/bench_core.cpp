#include <benchmark/benchmark.h>

#include "fpp/data/synth.hpp"
#include "fpp/models/polynomial.hpp"
#include "fpp/optim/fit.hpp"
#include "fpp/optim/stiefel.hpp"
#include "fpp/random.hpp"

namespace {

using namespace fpp;

Basis2 gaussian_basis(std::size_t d, std::uint64_t seed) {
  Engine e = make_engine(seed);
  Basis2 p(static_cast<Eigen::Index>(d), 2);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = standard_normal(e);
  return p;
}

void BM_Retract(benchmark::State& state) {
  const Basis2 p = gaussian_basis(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(retract(p));
}
BENCHMARK(BM_Retract)->RangeMultiplier(10)->Range(10, 100000);

void BM_ThinSvd(benchmark::State& state) {
  const Basis2 p = gaussian_basis(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(thin_svd2(p));
}
BENCHMARK(BM_ThinSvd)->RangeMultiplier(10)->Range(10, 100000);

void BM_ObjectiveGradientBatch(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Dataset data = synth_circle(50, d, 0.05, 3);
  const Basis2 p = random_orthonormal(d, 4).basis();
  std::vector<Head> heads{PolynomialHead::zeros(3)};
  for (auto _ : state) benchmark::DoNotOptimize(objective_gradient(data.features(), p, heads, data.responses()));
}
BENCHMARK(BM_ObjectiveGradientBatch)->Arg(5)->Arg(30)->Arg(784)->Arg(20000);

void BM_FitCircle(benchmark::State& state) {
  const Dataset data = synth_circle(3000, static_cast<std::size_t>(state.range(0)), 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit(data, HyperParams{}));
  state.SetItemsProcessed(state.iterations() * 3000 * 50);
}
BENCHMARK(BM_FitCircle)->Arg(5)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Dataset data = synth_noise(10000, d, 5);
  const ProjectionMatrix p = random_orthonormal(d, 6);
  for (auto _ : state) benchmark::DoNotOptimize(project(p, data.features()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(10000 * d * sizeof(double)));
}
BENCHMARK(BM_Project)->Arg(5)->Arg(100)->Arg(784);

void BM_DesignMatrix(benchmark::State& state) {
  Engine e = make_engine(7);
  Points2 y(1000, 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = standard_normal(e);
  for (auto _ : state) benchmark::DoNotOptimize(design_matrix(y, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DesignMatrix)->DenseRange(1, 5);

}  // namespace

BENCHMARK_MAIN();
