#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fpp {

/// Engine used for every stochastic step. mt19937_64 output is fully
/// specified by the standard, so a seed pins the stream.
using Engine = std::mt19937_64;

/// Seeds an engine through std::seed_seq so nearby seeds give unrelated streams.
Engine make_engine(std::uint64_t seed);

/// Independent child seed for stream `index` of `base` (trials, cells, responses).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text);

double standard_normal(Engine& engine);
double uniform(Engine& engine, double lo, double hi);

}  // namespace fpp
