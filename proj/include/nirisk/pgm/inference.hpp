#pragma once

#include "nirisk/pgm/factor.hpp"
#include "nirisk/pgm/network.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace nirisk::pgm {

// The brute-force path refuses networks with more joint states than this.
inline constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 22;

// Product of every node's conditional probability at the given complete
// assignment.  Throws IncompleteAssignment if a variable is unbound.
double joint_probability(const Network& net, const Assignment& full);
double joint_probability(const Network& net, std::span<const int> states);

// Exact P(query | evidence) by variable elimination over the ancestors of the
// query and evidence nodes.
//
// Throws InputError if the query is bound in the evidence, SchemaMismatch for
// unknown variables or labels, and ImpossibleEvidence when the evidence has
// probability zero.
Distribution posterior(const Network& net, std::string_view query, const Assignment& evidence);

// Reference path: sums joint_probability over every completion of the
// evidence.  Throws RangeError above kEnumerationLimit joint states.
Distribution posterior_enumeration(const Network& net, std::string_view query, const Assignment& evidence);

// Normalized joint posterior over several nodes (network indices).  Evidence
// is an index-level state vector with -1 for unobserved nodes; observed query
// nodes come out as point masses.  The returned factor spans exactly the
// query nodes, sums to one and has log_scale 0.
Factor joint_posterior(const Network& net, std::span<const int> query, std::span<const int> evidence);

std::uint64_t joint_state_count(const Network& net);

}  // namespace nirisk::pgm
