#pragma once

#include "nirisk/pgm/network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace nirisk::pgm {

// Uniform double in [0, 1) from the top 53 bits of one engine draw.  Used
// instead of std::uniform_real_distribution so streams are identical across
// standard library implementations.
double uniform01(std::mt19937_64& rng);

// Index drawn from a probability row by inverse CDF.
int draw_categorical(const Eigen::Ref<const Eigen::RowVectorXd>& probs, std::mt19937_64& rng);

// Ancestral sample in topological order, as state indices.
std::vector<int> sample_states(const Network& net, std::mt19937_64& rng);

// Complete assignment drawn by ancestral sampling; deterministic per seed.
Assignment sample(const Network& net, std::uint64_t seed);

}  // namespace nirisk::pgm
