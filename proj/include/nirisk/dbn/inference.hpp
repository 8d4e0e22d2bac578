#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/factor.hpp"
#include "nirisk/pgm/network.hpp"

namespace nirisk::dbn {

// Flat network with the static slice once and `days` copies of the template
// named "X[1]".."X[days]".  Throws SpecError for an invalid spec and
// RangeError for days < 1.
pgm::Network unroll(const DbnSpec& spec, int days);

// Timeline evidence renamed onto the unrolled network, days 1..through.
pgm::Assignment unrolled_evidence(const EvidenceTimeline& timeline, int through);

// Exact forward recursion.
//
// The belief carried from day to day is the joint posterior over the bridge
// sources and the interface variables (those with an outgoing inter-slice
// arc); given both, later days are independent of everything earlier.  Each
// step multiplies the belief into that day's CPTs, reduces by the day's
// evidence, and eliminates everything else.  Copies are independent, which
// is how what-if queries branch off a session.
class ForwardFilter {
 public:
  // Throws ImpossibleEvidence if the static evidence has probability zero.
  ForwardFilter(const DbnSpec& spec, const pgm::Assignment& static_evidence);

  // Absorb the next day's evidence and return P(result = yes | everything so
  // far).  Throws ImpossibleEvidence.
  double step(const pgm::Assignment& day_evidence);

  int day() const { return day_; }
  // Posterior over the result node on the last absorbed day.
  const pgm::Distribution& last() const { return last_; }

 private:
  const DbnSpec* spec_;
  pgm::Factor belief_;
  int day_ = 0;
  pgm::Distribution last_;
};

// P(result_t | static evidence, days 1..t) by forward recursion.  Throws
// RangeError unless 1 <= t <= number of evidenced days.
pgm::Distribution filter(const DbnSpec& spec, const EvidenceTimeline& timeline, int t);

// Same quantity by variable elimination on the network unrolled to day t.
pgm::Distribution filter_unrolled(const DbnSpec& spec, const EvidenceTimeline& timeline, int t);

// Day-0 risk: the static result node's posterior when the spec names one,
// otherwise the day-1 prediction before any daily evidence.
double baseline(const DbnSpec& spec, const pgm::Assignment& static_evidence);

// Day-0 baseline followed by (i, P(result_i = yes | evidence through i)) for
// every evidenced day.
PredictionTrace predict_trajectory(const DbnSpec& spec, const EvidenceTimeline& timeline);

struct ConsistencyReport {
  std::vector<double> forward;
  std::vector<double> unrolled;
  double max_abs_deviation = 0.0;
};

// Filters every day both ways and reports the largest disagreement.
ConsistencyReport forward_equals_unrolled(const DbnSpec& spec, const EvidenceTimeline& timeline);

}  // namespace nirisk::dbn
