#pragma once

// Seeded random streams. Every replicate gets its own engine seeded from
// (master seed, replicate index), so results do not depend on how replicates
// are scheduled across threads. Distributions come from Boost.Random, whose
// algorithms are fixed across standard libraries.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hfa {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` (and optional sub-stream) of a master seed.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0) {
  return mix64(mix64(master ^ 0x5851f42d4c957f2dULL) + mix64(index) + mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0) {
  return Engine(split_seed(master, index, stream));
}

/// Nondeterministic seed for runs without --seed.
std::uint64_t draw_seed();

double standard_normal(Engine& engine);
/// Uniform integer in [0, upper).
std::size_t uniform_index(Engine& engine, std::size_t upper);
double uniform01(Engine& engine);

Eigen::VectorXd normal_vector(Engine& engine, Eigen::Index n, double sd);

/// Uniform random permutation of v (Fisher-Yates).
Eigen::VectorXd permuted(const Eigen::VectorXd& v, Engine& engine);

/// n draws from v with replacement.
Eigen::VectorXd resampled(const Eigen::VectorXd& v, Engine& engine);

}  // namespace hfa
