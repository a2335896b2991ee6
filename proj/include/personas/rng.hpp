#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace personas {

// Counter-based seed derivation: every stochastic step draws its stream from
// splitmix64(root, a, b), so any (r, sample) iteration can be replayed alone.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

// Uniform integer in [0, bound) by rejection; unlike the standard
// distributions its output is identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

// Sorted uniform random subset of {0..n-1} of size k (partial Fisher-Yates).
std::vector<int> sample_subset(std::mt19937_64& engine, int n, int k);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(std::mt19937_64& engine);

}  // namespace personas
