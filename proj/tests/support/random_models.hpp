#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/network.hpp"

#include <random>

namespace testing_support {

struct NetworkShape {
  int min_vars = 2;
  int max_vars = 6;
  int max_states = 3;
  int max_parents = 3;
  // Chance that a table entry is exactly zero.
  double zero_chance = 0.0;
};

// Random DAG with random tables; variables are declared in shuffled order so
// declaration order and topological order differ.
nirisk::pgm::Network random_network(std::mt19937_64& rng, const NetworkShape& shape = {});

struct DbnShape {
  int max_static = 2;
  int max_temporal = 4;
  int max_states = 3;
  int max_days = 4;
  // Upper bound on static states times per-day states to the max_days.
  double max_joint = double(1 << 20);
};

// Random valid DBN whose result node is a binary {yes, no} template variable.
nirisk::dbn::DbnSpec random_dbn(std::mt19937_64& rng, const DbnShape& shape = {});

// Random partial evidence for `days` days (each cell observed with
// probability `observe`), drawn from the spec itself so it is possible.  The
// result node is never bound.
nirisk::dbn::EvidenceTimeline random_timeline(const nirisk::dbn::DbnSpec& spec, int days, double observe,
                                              std::mt19937_64& rng);

}  // namespace testing_support
