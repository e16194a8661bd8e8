#include "fpp/data/synth.hpp"

#include <cmath>
#include <numbers>

#include "fpp/error.hpp"
#include "fpp/random.hpp"

namespace fpp {

namespace {

RowMatrix uniform_features(std::size_t n, std::size_t dim, Engine& engine) {
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(engine);
  return x;
}

Basis2 random_plane(std::size_t dim, Engine& engine) {
  Basis2 basis(static_cast<Eigen::Index>(dim), 2);
  for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = standard_normal(engine);
  basis.col(0).normalize();
  basis.col(1) -= basis.col(0).dot(basis.col(1)) * basis.col(0);
  basis.col(1).normalize();
  return basis;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

Dataset synth_circle(std::size_t n, std::size_t dim, double noise_sigma, std::uint64_t seed,
                     CircleShape shape) {
  require(n >= 1, "synth_circle: n must be >= 1");
  require(dim >= 2, "synth_circle: dim must be >= 2");
  require(noise_sigma >= 0.0, "synth_circle: noise_sigma must be >= 0");
  require(shape.width > 0.0, "synth_circle: width must be > 0");

  Engine engine = make_engine(seed);
  RowMatrix x = uniform_features(n, dim, engine);
  Vector f(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double r = std::hypot(x(i, 0), x(i, 1));
    const double z = (r - shape.radius) / shape.width;
    f[i] = std::exp(-z * z);
  }
  if (noise_sigma > 0.0) {
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] += noise_sigma * standard_normal(engine);
  }

  std::vector<Response> responses{Response::continuous("f", std::move(f))};
  Dataset data(std::move(x), std::move(responses));
  SyntheticMeta meta;
  meta.generator = "circle";
  meta.ground_truth = Basis2::Zero(static_cast<Eigen::Index>(dim), 2);
  meta.ground_truth(0, 0) = 1.0;
  meta.ground_truth(1, 1) = 1.0;
  meta.parameters = {{"n", static_cast<double>(n)},   {"dim", static_cast<double>(dim)},
                     {"noise_sigma", noise_sigma},    {"radius", shape.radius},
                     {"width", shape.width},          {"seed", static_cast<double>(seed)}};
  data.set_meta(std::move(meta));
  return data;
}

double multi_response_value(std::size_t l, std::size_t response_count, double su, double sv) {
  const double phi = std::numbers::pi * static_cast<double>(l) / static_cast<double>(response_count);
  const double s = std::cos(phi) * su + std::sin(phi) * sv;
  const double t = -std::sin(phi) * su + std::cos(phi) * sv;
  switch (l % 5) {
    case 0:
      return s + 0.5 * t * t;
    case 1:
      return s * t + 0.5 * s;
    case 2:
      return std::exp(-((s - 0.5) * (s - 0.5) + t * t) / 2.0);
    case 3:
      return 0.3 * s * s * s - s + 0.5 * t;
    default:
      return std::sin(1.2 * s) + 0.4 * t * t;
  }
}

Dataset synth_multi(std::size_t n, std::size_t dim, std::size_t response_count, std::uint64_t seed,
                    double noise_sigma) {
  require(n >= 1, "synth_multi: n must be >= 1");
  require(dim >= 2, "synth_multi: dim must be >= 2");
  require(response_count >= 1, "synth_multi: response_count must be >= 1");
  require(noise_sigma >= 0.0, "synth_multi: noise_sigma must be >= 0");

  Engine engine = make_engine(seed);
  const Basis2 plane = random_plane(dim, engine);
  RowMatrix x = uniform_features(n, dim, engine);
  const Points2 hidden = std::sqrt(3.0) * (x * plane);

  std::vector<Response> responses;
  responses.reserve(response_count);
  for (std::size_t l = 0; l < response_count; ++l) {
    Vector f(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      f[i] = multi_response_value(l, response_count, hidden(i, 0), hidden(i, 1));
    }
    if (noise_sigma > 0.0) {
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] += noise_sigma * standard_normal(engine);
    }
    responses.push_back(Response::continuous("f" + std::to_string(l), std::move(f)));
  }

  Dataset data(std::move(x), std::move(responses));
  SyntheticMeta meta;
  meta.generator = "multi";
  meta.ground_truth = plane;
  meta.parameters = {{"n", static_cast<double>(n)},
                     {"dim", static_cast<double>(dim)},
                     {"responses", static_cast<double>(response_count)},
                     {"noise_sigma", noise_sigma},
                     {"seed", static_cast<double>(seed)}};
  data.set_meta(std::move(meta));
  return data;
}

Dataset synth_blobs(std::size_t n, std::size_t dim, int class_count, double separation,
                    std::uint64_t seed) {
  require(n >= 1, "synth_blobs: n must be >= 1");
  require(dim >= 2, "synth_blobs: dim must be >= 2");
  require(class_count >= 2, "synth_blobs: class count K must be >= 2");
  require(separation >= 0.0, "synth_blobs: separation must be >= 0");

  Engine engine = make_engine(seed);
  const Basis2 plane = random_plane(dim, engine);
  const double k = static_cast<double>(class_count);
  const double circumradius = separation / (2.0 * std::sin(std::numbers::pi / k));

  Matrix means(static_cast<Eigen::Index>(dim), class_count);
  for (int c = 0; c < class_count; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / k;
    means.col(c) = circumradius * (std::cos(angle) * plane.col(0) + std::sin(angle) * plane.col(1));
  }

  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(class_count));
    labels[i] = c;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(static_cast<Eigen::Index>(i), j) = means(j, c) + standard_normal(engine);
    }
  }

  std::vector<Response> responses{Response::categorical("label", std::move(labels), class_count)};
  Dataset data(std::move(x), std::move(responses));
  SyntheticMeta meta;
  meta.generator = "blobs";
  meta.ground_truth = plane;
  meta.parameters = {{"n", static_cast<double>(n)},
                     {"dim", static_cast<double>(dim)},
                     {"k", k},
                     {"separation", separation},
                     {"seed", static_cast<double>(seed)}};
  data.set_meta(std::move(meta));
  return data;
}

Dataset synth_noise(std::size_t n, std::size_t dim, std::uint64_t seed) {
  require(n >= 1, "synth_noise: n must be >= 1");
  require(dim >= 1, "synth_noise: dim must be >= 1");
  Engine engine = make_engine(seed);
  RowMatrix x = uniform_features(n, dim, engine);
  Vector f(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = standard_normal(engine);
  std::vector<Response> responses{Response::continuous("f", std::move(f))};
  Dataset data(std::move(x), std::move(responses));
  SyntheticMeta meta;
  meta.generator = "noise";
  meta.parameters = {{"n", static_cast<double>(n)},
                     {"dim", static_cast<double>(dim)},
                     {"seed", static_cast<double>(seed)}};
  data.set_meta(std::move(meta));
  return data;
}

}  // namespace fpp
