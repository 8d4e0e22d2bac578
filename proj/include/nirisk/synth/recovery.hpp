#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/io.hpp"

#include <string>
#include <vector>

namespace nirisk::synth {

struct RowDistance {
  std::string table;  // "X", or "X (day 1)" for an initial table
  std::string given;  // parent configuration, "P=s,Q=t"
  double l1 = 0.0;
};

struct RecoveryReport {
  std::vector<RowDistance> rows;
  double max_l1 = 0.0;
  double mean_l1 = 0.0;
};

// Per-row L1 distance between every table of two specs.  Throws
// ComparisonError unless both share variables, states and parent lists.
RecoveryReport recovery_report(const dbn::DbnSpec& ground_truth, const dbn::DbnSpec& learned);

pgm::json recovery_to_json(const RecoveryReport& report);

}  // namespace nirisk::synth
