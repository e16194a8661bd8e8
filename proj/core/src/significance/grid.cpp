#include "fpp/significance/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "fpp/data/synth.hpp"
#include "fpp/error.hpp"
#include "fpp/parallel.hpp"
#include "fpp/random.hpp"
#include "fpp/significance/null.hpp"

namespace fpp {

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("spearman: need two equal-length series (n >= 2)");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

HyperParams grid_cell_hyperparams(const GridConfig& config, std::size_t n, std::uint64_t seed) {
  HyperParams hp = config.hyperparams;
  hp.batch_size = std::min(hp.batch_size, n);
  const std::size_t batches = (n + hp.batch_size - 1) / hp.batch_size;
  const std::size_t needed = (config.min_steps + batches - 1) / batches;
  hp.epochs = std::max(hp.epochs, needed);
  hp.seed = seed;
  return hp;
}

GridStudyResult grid_study(const GridConfig& config) {
  if (config.dims.empty() || config.sizes.empty()) throw ValidationError("grid study: empty grid");
  if (config.trials < 2) throw ValidationError("grid study: trials per cell must be >= 2");
  for (std::size_t d : config.dims) {
    if (d < 2) throw ValidationError("grid study: every D must be >= 2");
  }
  for (std::size_t n : config.sizes) {
    if (n < 2) throw ValidationError("grid study: every N must be >= 2");
  }

  const std::size_t nd = config.dims.size();
  const std::size_t ns = config.sizes.size();
  const std::size_t cells = nd * ns;
  const std::size_t total = cells * config.trials;
  std::vector<double> r2(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> messages(total);

  parallel_for(total, config.threads, [&](std::size_t task) {
    const std::size_t cell = task / config.trials;
    const std::size_t trial = task % config.trials;
    const std::size_t di = cell / ns;
    const std::size_t si = cell % ns;
    const std::uint64_t cell_seed = derive_seed(config.seed, cell);
    const std::uint64_t trial_seed = derive_seed(cell_seed, trial);
    try {
      const Dataset data = synth_noise(config.sizes[si], config.dims[di], trial_seed);
      const HyperParams hp = grid_cell_hyperparams(config, config.sizes[si], derive_seed(trial_seed, 1));
      const FitResult fitted = fit(data, hp);
      r2[task] = fitted.train_scores.at(0).value;
    } catch (const std::exception& e) {
      messages[task] = "D=" + std::to_string(config.dims[di]) + " N=" + std::to_string(config.sizes[si]) +
                       " trial " + std::to_string(trial) + ": " + e.what();
    }
  });

  GridStudyResult out;
  out.dims = config.dims;
  out.sizes = config.sizes;
  out.trials = config.trials;
  out.reference_r2 = config.reference_r2;
  out.mean_r2 = Matrix::Constant(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(ns),
                                 std::numeric_limits<double>::quiet_NaN());
  out.sd_r2 = out.mean_r2;
  out.p_at_reference = out.mean_r2;
  out.failures = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(ns));
  out.samples.assign(nd, std::vector<std::vector<double>>(ns));

  for (std::size_t di = 0; di < nd; ++di) {
    for (std::size_t si = 0; si < ns; ++si) {
      NullDistribution cell;
      cell.metric = MetricKind::R2;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const std::size_t task = (di * ns + si) * config.trials + t;
        if (!messages[task].empty()) {
          out.errors.push_back(messages[task]);
          ++out.failures(static_cast<Eigen::Index>(di), static_cast<Eigen::Index>(si));
        } else {
          cell.samples.push_back(r2[task]);
        }
      }
      out.samples[di][si] = cell.samples;
      const auto r = static_cast<Eigen::Index>(di);
      const auto c = static_cast<Eigen::Index>(si);
      if (cell.samples.size() >= 2) {
        out.mean_r2(r, c) = cell.mean();
        out.sd_r2(r, c) = cell.stddev();
        if (out.sd_r2(r, c) > 0.0) {
          out.p_at_reference(r, c) = p_value_parametric(config.reference_r2, cell);
        } else {
          out.p_at_reference(r, c) = config.reference_r2 <= out.mean_r2(r, c) ? 1.0 : 0.0;
        }
      } else if (cell.samples.size() == 1) {
        out.mean_r2(r, c) = cell.samples[0];
      }
    }
  }
  return out;
}

}  // namespace fpp
