#pragma once

#include <cstdint>

#include "fpp/data/dataset.hpp"

namespace fpp {

/// Radial profile of the circle response, f = exp(-(r - radius)^2 / width^2)
/// with r = sqrt(x1^2 + x2^2). The defaults give a shallow ring (peak at
/// r = 0.3, centre value exp(-0.140625)) that a cubic in the plane can
/// represent to R^2 ~ 0.98.
struct CircleShape {
  double radius = 0.3;
  double width = 0.8;
};

/// Features i.i.d. uniform on [-1, 1]^dim; one continuous response "f" on the
/// first two coordinates plus N(0, noise_sigma^2). Ground truth: axes e1, e2.
Dataset synth_circle(std::size_t n, std::size_t dim, double noise_sigma, std::uint64_t seed,
                     CircleShape shape = {});

/// Features uniform on [-1, 1]^dim. Hidden unit vectors a _|_ b are drawn from
/// the seed; with s_u = sqrt(3) <a, x>, s_v = sqrt(3) <b, x> (unit variance)
/// and, for response l, phi = pi * l / L,
///   s = cos(phi) s_u + sin(phi) s_v,   t = -sin(phi) s_u + cos(phi) s_v,
/// response l uses formula (l mod 5):
///   0: s + 0.5 t^2
///   1: s t + 0.5 s
///   2: exp(-((s - 0.5)^2 + t^2) / 2)
///   3: 0.3 s^3 - s + 0.5 t
///   4: sin(1.2 s) + 0.4 t^2
/// Responses are named f0..f{L-1}. Ground truth: [a b].
Dataset synth_multi(std::size_t n, std::size_t dim, std::size_t response_count, std::uint64_t seed,
                    double noise_sigma = 0.0);

/// Evaluates formula (l mod 5) above at rotated coordinates (s_u, s_v).
double multi_response_value(std::size_t l, std::size_t response_count, double su, double sv);

/// K isotropic unit-variance Gaussian clusters in R^dim. Cluster means sit on a
/// regular K-gon inside a hidden random plane, adjacent vertices `separation`
/// apart (so every pair is at least that far). Sample i belongs to cluster
/// i mod K. Categorical response "label".
Dataset synth_blobs(std::size_t n, std::size_t dim, int class_count, double separation,
                    std::uint64_t seed);

/// i.i.d. uniform [-1, 1] features with one i.i.d. standard normal response;
/// the random-data model behind grid studies and overfit checks.
Dataset synth_noise(std::size_t n, std::size_t dim, std::uint64_t seed);

}  // namespace fpp
