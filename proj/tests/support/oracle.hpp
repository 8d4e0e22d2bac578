#pragma once

// Brute-force reference computations written against the raw tables only,
// sharing no code with the engine's inference paths.

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/network.hpp"

#include <vector>

namespace oracle {

// Product of CPT entries at a complete assignment given as state indices in
// network order.
double joint(const nirisk::pgm::Network& net, const std::vector<int>& states);

// Sum of joint() over every assignment.
double total_mass(const nirisk::pgm::Network& net);

// P(query | evidence) by summing the joint; evidence entries of -1 are free.
std::vector<double> posterior(const nirisk::pgm::Network& net, int query, const std::vector<int>& evidence);

// P(result_t = yes | static evidence, day evidence 1..t) by enumerating every
// static and daily state of a DBN for t days.
double filter(const nirisk::dbn::DbnSpec& spec, const nirisk::dbn::EvidenceTimeline& timeline, int t);

}  // namespace oracle
