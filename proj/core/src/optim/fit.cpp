#include "fpp/optim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "fpp/error.hpp"
#include "fpp/models/loss.hpp"
#include "fpp/models/ols.hpp"
#include "fpp/random.hpp"

namespace fpp {

namespace {

// Stream indices under the run seed.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamBatches = 2;
constexpr std::uint64_t kStreamHeads = 3;
constexpr std::uint64_t kStreamRecovery = 4;
constexpr std::uint64_t kStreamPreProjection = 5;
constexpr std::uint64_t kStreamSplit = 6;

std::size_t head_size(const Head& head) {
  return std::visit(
      [](const auto& h) -> std::size_t {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, PolynomialHead>) {
          return static_cast<std::size_t>(h.coefficients.size());
        } else {
          return h.parameter_count();
        }
      },
      head);
}

void pack_head(const Head& head, Vector& out, Eigen::Index& at) {
  auto put = [&](const auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) out[at++] = block.data()[i];
  };
  std::visit(
      [&](const auto& h) {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, PolynomialHead>) {
          put(h.coefficients);
        } else {
          put(h.w1);
          put(h.b1);
          put(h.w2);
          put(h.b2);
        }
      },
      head);
}

void unpack_head(Head& head, const Vector& in, Eigen::Index& at) {
  auto get = [&](auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = in[at++];
  };
  std::visit(
      [&](auto& h) {
        using T = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<T, PolynomialHead>) {
          get(h.coefficients);
        } else {
          get(h.w1);
          get(h.b1);
          get(h.w2);
          get(h.b2);
        }
      },
      head);
}

// Flat parameter vector [vec(P), theta_1, ..., theta_L].
Vector pack(const Basis2& p, const std::vector<Head>& heads) {
  std::size_t total = static_cast<std::size_t>(p.size());
  for (const auto& h : heads) total += head_size(h);
  Vector out(static_cast<Eigen::Index>(total));
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) out[at++] = p.data()[i];
  for (const auto& h : heads) pack_head(h, out, at);
  return out;
}

void unpack(const Vector& in, Basis2& p, std::vector<Head>& heads) {
  Eigen::Index at = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = in[at++];
  for (auto& h : heads) unpack_head(h, in, at);
}

struct Moments {
  Vector first;
  Vector second;
  std::size_t steps = 0;
};

double score_continuous(const Vector& predictions, const Vector& targets) {
  const double mean = targets.mean();
  const double ss_tot = (targets.array() - mean).square().sum();
  if (targets.size() < 2 || !(ss_tot > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return r2_score(predictions, targets);
}

// Responses in the working (standardized) units.
std::vector<Response> working_responses(const Dataset& data, const std::optional<ScalingInfo>& scaling) {
  std::vector<Response> out;
  out.reserve(data.response_count());
  for (std::size_t l = 0; l < data.response_count(); ++l) {
    const Response& r = data.response(l);
    if (!scaling || r.is_categorical()) {
      out.push_back(r);
      continue;
    }
    const auto& ms = scaling->response_mean_scale.at(l);
    out.push_back(ms ? r.with_values((r.values().array() - ms->first) / ms->second) : r);
  }
  return out;
}

Evaluation evaluate_working(const RowMatrix& x, const ProjectionMatrix& p, const std::vector<Head>& heads,
                            const std::vector<Response>& responses) {
  const Points2 y = x * p.basis();
  Evaluation ev;
  for (std::size_t l = 0; l < heads.size(); ++l) {
    const Response& r = responses[l];
    if (const auto* poly = std::get_if<PolynomialHead>(&heads[l])) {
      const Vector pred = poly->predict(y);
      ev.response_losses.push_back(mse_loss(pred, r.values()).value);
      ev.scores.push_back({r.name(), r.kind(), score_continuous(pred, r.values())});
    } else {
      const auto& soft = std::get<SoftmaxHead>(heads[l]);
      const Matrix prob = soft.predict(y);
      ev.response_losses.push_back(cross_entropy_loss(prob, r.labels()).value);
      const auto predicted = soft.classify(y);
      ev.scores.push_back({r.name(), r.kind(), accuracy(predicted, r.labels())});
    }
  }
  ev.loss = std::accumulate(ev.response_losses.begin(), ev.response_losses.end(), 0.0) /
            static_cast<double>(heads.size());
  return ev;
}

}  // namespace

void HyperParams::validate(std::size_t n_train, std::size_t dim, std::size_t response_count) const {
  auto fail = [](const std::string& m) { throw ValidationError("hyperparameters: " + m); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning rate must be > 0");
  if (batch_size < 1) fail("batch size must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (degree < 1) fail("degree must be >= 1");
  if (hidden_width < 0) fail("hidden width must be >= 0");
  if (max_lr_halvings < 0) fail("max_lr_halvings must be >= 0");
  if (!(divergence_factor > 1.0)) fail("divergence factor must be > 1");
  if (batch_size > n_train) {
    fail("batch size " + std::to_string(batch_size) + " exceeds N=" + std::to_string(n_train));
  }
  if (dim < 2) fail("D must be >= 2");
  if (pre_dim != 0 && (pre_dim < 2 || pre_dim >= dim)) {
    fail("pre-projection dimension must satisfy 2 <= D' < D=" + std::to_string(dim));
  }
  if (!response_degrees.empty() && response_degrees.size() != response_count) {
    fail("response_degrees has " + std::to_string(response_degrees.size()) + " entries for " +
         std::to_string(response_count) + " responses");
  }
  for (int d : response_degrees) {
    if (d < 1) fail("degree must be >= 1");
  }
}

int HyperParams::degree_for(std::size_t response) const {
  return response_degrees.empty() ? degree : response_degrees.at(response);
}

double HyperParams::rate_at(double lr, std::size_t epoch) const {
  if (schedule == LearningRateSchedule::Constant) return lr;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs);
  return lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

RowMatrix FitResult::working_features(const RowMatrix& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != composite.dim()) {
    throw ValidationError("data has " + std::to_string(raw.cols()) + " features, fit expects " +
                          std::to_string(composite.dim()));
  }
  RowMatrix x = scaling ? scaling->apply(raw) : raw;
  if (pre_projection) x = x * *pre_projection;
  return x;
}

Points2 FitResult::embed(const RowMatrix& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != composite.dim()) {
    throw ValidationError("data has " + std::to_string(raw.cols()) + " features, fit expects " +
                          std::to_string(composite.dim()));
  }
  if (scaling) return scaling->apply(raw) * composite.basis();
  return raw * composite.basis();
}

ObjectiveGradient objective_gradient(const RowMatrix& x, const Basis2& p, const std::vector<Head>& heads,
                                     const std::vector<Response>& responses) {
  if (heads.size() != responses.size() || heads.empty()) {
    throw ValidationError("objective_gradient: one head per response required");
  }
  const Points2 y = x * p;
  const double inv_l = 1.0 / static_cast<double>(heads.size());
  Points2 dy = Points2::Zero(y.rows(), 2);
  ObjectiveGradient out;
  out.heads.reserve(heads.size());
  for (std::size_t l = 0; l < heads.size(); ++l) {
    const Response& r = responses[l];
    if (const auto* poly = std::get_if<PolynomialHead>(&heads[l])) {
      if (r.is_categorical()) throw ValidationError("polynomial head paired with categorical response");
      PolynomialGradient g = head_gradients(*poly, y, r.values());
      out.value += g.loss * inv_l;
      out.response_losses.push_back(g.loss);
      dy += g.inputs;
      out.heads.emplace_back(PolynomialHead{poly->degree, inv_l * g.coefficients});
    } else {
      if (!r.is_categorical()) throw ValidationError("softmax head paired with continuous response");
      SoftmaxGradient g = head_gradients(std::get<SoftmaxHead>(heads[l]), y, r.labels());
      out.value += g.loss * inv_l;
      out.response_losses.push_back(g.loss);
      dy += g.inputs;
      g.parameters.w1 *= inv_l;
      g.parameters.b1 *= inv_l;
      g.parameters.w2 *= inv_l;
      g.parameters.b2 *= inv_l;
      out.heads.emplace_back(std::move(g.parameters));
    }
  }
  out.projection = x.transpose() * (inv_l * dy);
  return out;
}

FitResult fit(const Dataset& data, const HyperParams& hp) {
  if (data.response_count() == 0) throw ValidationError("fit: dataset has no responses");
  hp.validate(data.sample_count(), data.dim(), data.response_count());

  std::optional<ScalingInfo> scaling;
  if (hp.standardize) scaling = compute_scaling(data);
  RowMatrix x = scaling ? scaling->apply(data.features()) : data.features();
  std::optional<Matrix> pre;
  if (hp.pre_dim != 0) {
    pre = random_projection_preprocess(data.dim(), hp.pre_dim, pre_projection_seed(hp.seed));
    x = x * *pre;
  }
  const std::vector<Response> targets = working_responses(data, scaling);

  const std::size_t n = data.sample_count();
  const std::size_t dim = static_cast<std::size_t>(x.cols());
  Basis2 p = random_orthonormal(dim, derive_seed(hp.seed, kStreamInit)).basis();

  std::vector<Head> heads;
  for (std::size_t l = 0; l < targets.size(); ++l) {
    const Response& r = targets[l];
    if (r.is_categorical()) {
      // Seeded by name so reordering responses does not reshuffle initial weights.
      Engine engine = make_engine(derive_seed(derive_seed(hp.seed, kStreamHeads), stable_hash(r.name())));
      heads.emplace_back(SoftmaxHead::random(r.class_count(), hp.hidden_width, engine));
    } else {
      heads.emplace_back(PolynomialHead::zeros(hp.degree_for(l)));
    }
  }

  Engine batch_engine = make_engine(derive_seed(hp.seed, kStreamBatches));
  Engine recovery_engine = make_engine(derive_seed(hp.seed, kStreamRecovery));

  FitResult result{.projection = ProjectionMatrix(p), .pre_projection = pre, .composite = ProjectionMatrix(p), .scaling = scaling};
  result.seed = hp.seed;
  result.hyperparams = hp;

  Vector params = pack(p, heads);
  Moments moments{Vector::Zero(params.size()), Vector::Zero(params.size()), 0};
  double lr = hp.learning_rate;
  std::optional<double> reference_loss;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Training state at the start of an epoch; divergence rolls back to it.
  struct Snapshot {
    Vector params;
    Moments moments;
    Engine batches;
    std::vector<std::size_t> order;
    std::size_t recoveries;
  };
  std::deque<Snapshot> history;

  RowMatrix xb;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    history.push_back({params, moments, batch_engine, order, result.retraction_recoveries});
    if (history.size() > static_cast<std::size_t>(hp.max_lr_halvings) + 2) history.pop_front();

    const double step = hp.rate_at(lr, epoch);
    bool diverged = false;
    std::size_t bad_batch = 0;
    double epoch_loss = 0.0;
    std::shuffle(order.begin(), order.end(), batch_engine);
    for (std::size_t start = 0, batch = 0; start < n; start += hp.batch_size, ++batch) {
      const std::size_t stop = std::min(n, start + hp.batch_size);
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(stop));
      xb.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
      }
      std::vector<Response> batch_targets;
      batch_targets.reserve(targets.size());
      for (const auto& r : targets) batch_targets.push_back(r.take(rows));

      const ObjectiveGradient g = objective_gradient(xb, p, heads, batch_targets);
      if (!reference_loss) reference_loss = std::max(g.value, 1e-12);
      if (!std::isfinite(g.value) || g.value > hp.divergence_factor * *reference_loss) {
        diverged = true;
        bad_batch = batch;
        break;
      }
      epoch_loss += g.value * static_cast<double>(rows.size());

      const Vector grad = pack(g.projection, g.heads);
      if (hp.optimizer == OptimizerKind::Sgd) {
        params -= step * grad;
      } else {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        ++moments.steps;
        moments.first = beta1 * moments.first + (1.0 - beta1) * grad;
        moments.second = beta2 * moments.second + (1.0 - beta2) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(moments.steps));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(moments.steps));
        params.array() -= step * (moments.first.array() / c1) /
                          ((moments.second.array() / c2).sqrt() + eps);
      }
      unpack(params, p, heads);
      Retraction r = retract(p, hp.retraction, &recovery_engine);
      if (r.recovered) ++result.retraction_recoveries;
      p = r.projection.basis();
      result.max_orthonormality_error =
          std::max(result.max_orthonormality_error, r.projection.orthonormality_error());
      params.head(p.size()) = Eigen::Map<const Vector>(p.data(), p.size());
    }

    if (diverged) {
      if (result.learning_rate_halvings >= hp.max_lr_halvings) {
        throw RuntimeError("fit: non-finite or diverging loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(bad_batch) + " after " +
                           std::to_string(result.learning_rate_halvings) + " learning-rate halvings");
      }
      lr *= 0.5;
      ++result.learning_rate_halvings;
      // The batch loss is measured before the step, so the damage may predate
      // this epoch; each further halving retreats one epoch more.
      std::size_t back = static_cast<std::size_t>(result.learning_rate_halvings - 1) + (bad_batch == 0 ? 1 : 0);
      back = std::min(back, history.size() - 1);
      const std::size_t target = history.size() - 1 - back;
      const Snapshot saved = history[target];
      history.resize(target);
      result.loss_history.resize(result.loss_history.size() - back);
      params = saved.params;
      moments = saved.moments;
      batch_engine = saved.batches;
      order = saved.order;
      result.retraction_recoveries = saved.recoveries;
      unpack(params, p, heads);
      epoch -= back + 1;
      continue;
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(n));
  }

  const ProjectionMatrix final_p(p);
  if (hp.polish_heads) {
    const Points2 y = x * final_p.basis();
    for (std::size_t l = 0; l < heads.size(); ++l) {
      if (auto* poly = std::get_if<PolynomialHead>(&heads[l])) {
        if (static_cast<Eigen::Index>(n) >= monomial_count(poly->degree)) {
          *poly = ols_fit(y, targets[l].values(), poly->degree);
        }
      }
    }
  }

  const Evaluation ev = evaluate_working(x, final_p, heads, targets);
  if (!std::isfinite(ev.loss)) throw RuntimeError("fit: final training loss is not finite");

  result.projection = final_p;
  result.composite = pre ? retract(*pre * final_p.basis()).projection : final_p;
  result.heads = std::move(heads);
  for (const auto& r : targets) {
    result.response_names.push_back(r.name());
    result.response_kinds.push_back(r.kind());
  }
  result.final_train_loss = ev.loss;
  result.final_response_losses = ev.response_losses;
  result.train_scores = ev.scores;
  result.epochs_run = result.loss_history.size();
  result.final_learning_rate = hp.rate_at(lr, hp.epochs - 1);
  return result;
}

Evaluation evaluate(const FitResult& result, const Dataset& data) {
  if (data.response_count() != result.heads.size()) {
    throw ValidationError("evaluate: dataset has " + std::to_string(data.response_count()) +
                          " responses, fit has " + std::to_string(result.heads.size()));
  }
  for (std::size_t l = 0; l < data.response_count(); ++l) {
    if (data.response(l).kind() != result.response_kinds[l]) {
      throw ValidationError("evaluate: response '" + data.response(l).name() + "' kind differs from the fit");
    }
  }
  const RowMatrix x = result.working_features(data.features());
  return evaluate_working(x, result.projection, result.heads, working_responses(data, result.scaling));
}

std::uint64_t holdout_split_seed(std::uint64_t run_seed) { return derive_seed(run_seed, kStreamSplit); }

std::uint64_t pre_projection_seed(std::uint64_t run_seed) {
  return derive_seed(run_seed, kStreamPreProjection);
}

HoldoutFit fit_with_holdout(const Dataset& data, const HyperParams& hp, double test_fraction) {
  Split split = train_test_split(data, test_fraction, holdout_split_seed(hp.seed));
  FitResult result = fit(split.train, hp);
  const Evaluation test = evaluate(result, split.test);
  result.test_scores = test.scores;
  result.test_loss = test.loss;
  return {std::move(result), std::move(split)};
}

}  // namespace fpp
