#pragma once

#include "nirisk/dbn/learning.hpp"
#include "nirisk/dbn/spec.hpp"

#include <random>
#include <span>
#include <vector>

namespace nirisk::dbn {

// One complete draw: static states, then one template assignment per day.
struct Trajectory {
  pgm::Assignment statics;
  std::vector<pgm::Assignment> days;
};

// Template state indices for days 1..days given fixed static states,
// sampled slice by slice in topological order.
std::vector<std::vector<int>> sample_days(const DbnSpec& spec, std::span<const int> static_states, int days,
                                          std::mt19937_64& rng);

Trajectory sample_trajectory(const DbnSpec& spec, int days, std::mt19937_64& rng);

// Learning rows for fit_dbn, one static row per trajectory and one slice row
// per day.
SliceData slice_data(const DbnSpec& spec, const std::vector<Trajectory>& trajectories);

}  // namespace nirisk::dbn
