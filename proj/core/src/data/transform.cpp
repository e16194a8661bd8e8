#include "fpp/data/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fpp/error.hpp"
#include "fpp/random.hpp"

namespace fpp {

namespace {

std::pair<double, double> mean_scale(const Eigen::Ref<const Vector>& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  const double sd = std::sqrt(var);
  return {mean, sd > 0.0 ? sd : 1.0};
}

}  // namespace

RowMatrix ScalingInfo::apply(const RowMatrix& raw) const {
  RowMatrix out = raw;
  out.rowwise() -= feature_mean.transpose();
  out.array().rowwise() /= feature_scale.transpose().array();
  return out;
}

RowMatrix ScalingInfo::invert(const RowMatrix& standardized) const {
  RowMatrix out = standardized;
  out.array().rowwise() *= feature_scale.transpose().array();
  out.rowwise() += feature_mean.transpose();
  return out;
}

double ScalingInfo::apply_response(std::size_t index, double raw) const {
  const auto& ms = response_mean_scale.at(index);
  return ms ? (raw - ms->first) / ms->second : raw;
}

double ScalingInfo::invert_response(std::size_t index, double standardized) const {
  const auto& ms = response_mean_scale.at(index);
  return ms ? standardized * ms->second + ms->first : standardized;
}

ScalingInfo compute_scaling(const Dataset& data) {
  const RowMatrix& x = data.features();
  ScalingInfo info;
  info.feature_mean.resize(x.cols());
  info.feature_scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Vector col = x.col(j);
    const auto [m, s] = mean_scale(col);
    info.feature_mean[j] = m;
    info.feature_scale[j] = s;
  }
  for (const auto& r : data.responses()) {
    if (r.is_categorical()) {
      info.response_mean_scale.emplace_back(std::nullopt);
    } else {
      info.response_mean_scale.emplace_back(mean_scale(r.values()));
    }
  }
  return info;
}

Dataset apply_scaling(const Dataset& data, const ScalingInfo& scaling) {
  if (static_cast<std::size_t>(scaling.feature_mean.size()) != data.dim() ||
      scaling.response_mean_scale.size() != data.response_count()) {
    throw ValidationError("scaling does not match dataset shape");
  }
  std::vector<Response> responses;
  for (std::size_t l = 0; l < data.response_count(); ++l) {
    const Response& r = data.response(l);
    const auto& ms = scaling.response_mean_scale[l];
    if (r.is_categorical() || !ms) {
      responses.push_back(r);
    } else {
      responses.push_back(r.with_values((r.values().array() - ms->first) / ms->second));
    }
  }
  Dataset out(scaling.apply(data.features()), std::move(responses), data.column_names());
  if (data.meta()) out.set_meta(*data.meta());
  return out;
}

std::pair<Dataset, ScalingInfo> standardize(const Dataset& data) {
  ScalingInfo info = compute_scaling(data);
  Dataset out = apply_scaling(data, info);
  return {std::move(out), std::move(info)};
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine engine = make_engine(seed);
  std::shuffle(order.begin(), order.end(), engine);
  return order;
}

std::size_t train_size_for(std::size_t n, double test_fraction) {
  // The epsilon keeps exact products such as 10 * 0.7 from rounding up.
  const double raw = static_cast<double>(n) * (1.0 - test_fraction);
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

Split train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must lie in (0, 1), got " + std::to_string(test_fraction));
  }
  const std::size_t n = data.sample_count();
  const std::size_t n_train = train_size_for(n, test_fraction);
  if (n_train < 1 || n_train >= n) {
    throw ValidationError("split of N=" + std::to_string(n) + " with test fraction " +
                          std::to_string(test_fraction) + " leaves an empty side");
  }
  const std::size_t n_test = n - n_train;

  Split split{data, data, {}, {}, false, false};
  const Response* strata = nullptr;
  for (const auto& r : data.responses()) {
    if (r.is_categorical()) {
      strata = &r;
      break;
    }
  }

  Engine engine = make_engine(seed);
  if (strata != nullptr) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(strata->class_count()));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(strata->labels()[i])].push_back(i);
    const bool feasible = std::all_of(members.begin(), members.end(),
                                      [](const auto& m) { return m.empty() || m.size() >= 2; });
    if (feasible) {
      // Largest-remainder allocation of the test quota across classes, with
      // every populated class keeping at least one row on each side.
      const std::size_t k = members.size();
      std::vector<std::size_t> quota(k, 0);
      std::vector<std::pair<double, std::size_t>> remainders;
      std::size_t assigned = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (members[c].empty()) continue;
        const double exact = static_cast<double>(members[c].size()) * static_cast<double>(n_test) /
                             static_cast<double>(n);
        quota[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact + 1e-9)), 1,
                                           members[c].size() - 1);
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact + 1e-9), c);
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t pass = 0; assigned < n_test && pass < 2 * k + n; ++pass) {
        const std::size_t c = remainders[pass % remainders.size()].second;
        if (quota[c] + 1 < members[c].size()) {
          ++quota[c];
          ++assigned;
        }
      }
      for (std::size_t pass = 0; assigned > n_test && pass < 2 * k + n; ++pass) {
        const std::size_t c = remainders[remainders.size() - 1 - pass % remainders.size()].second;
        if (quota[c] > 1) {
          --quota[c];
          --assigned;
        }
      }
      if (assigned == n_test) {
        for (std::size_t c = 0; c < k; ++c) {
          auto rows = members[c];
          std::shuffle(rows.begin(), rows.end(), engine);
          split.test_rows.insert(split.test_rows.end(), rows.begin(),
                                 rows.begin() + static_cast<std::ptrdiff_t>(quota[c]));
          split.train_rows.insert(split.train_rows.end(),
                                  rows.begin() + static_cast<std::ptrdiff_t>(quota[c]), rows.end());
        }
        std::sort(split.train_rows.begin(), split.train_rows.end());
        std::sort(split.test_rows.begin(), split.test_rows.end());
        split.stratified = true;
      } else {
        split.stratification_fallback = true;
      }
    } else {
      split.stratification_fallback = true;
    }
  }

  if (!split.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), engine);
    split.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(split.train_rows.begin(), split.train_rows.end());
    std::sort(split.test_rows.begin(), split.test_rows.end());
  }
  split.train = data.take_rows(split.train_rows);
  split.test = data.take_rows(split.test_rows);
  return split;
}

Dataset shuffle_response(const Dataset& data, std::size_t response_index, std::uint64_t seed) {
  const Response& target = data.response(response_index);
  const auto order = random_permutation(data.sample_count(), seed);
  std::vector<Response> responses = data.responses();
  responses[response_index] = target.take(order);
  return data.with_responses(std::move(responses));
}

}  // namespace fpp
