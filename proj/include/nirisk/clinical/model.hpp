#pragma once

#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/spec.hpp"

#include <vector>

namespace nirisk::clinical {

// Built-in network over a schema.
//
// Static slice: `result` is the root and parent of every other fixed
// variable, plus age1 -> ant, age1 -> priseAnti, orig -> detorig, and
// age1 -> cissue (which has no link to result).  Template: result_t depends
// on result_t[t-1] and on the static result (day 1: on result alone); every
// other daily variable is an observation of result_t.  Tables are uniform.
dbn::DbnSpec default_structure(const ClinicalSchema& schema);

// weights[k] is the relative frequency of a stay lasting k + 1 days.
std::vector<double> uniform_stay_weights(int min_days, int max_days);

// Distribution of the stay-length variable's bins implied by the weights.
Eigen::RowVectorXd stay_bin_distribution(const Derivation& stay_length, const std::vector<double>& weights);

// default_structure with hand-set tables, used as the simulation ground
// truth.  Infection is absorbing; the stay-length table matches `weights`.
dbn::DbnSpec ground_truth_spec(const ClinicalSchema& schema, const std::vector<double>& stay_weights);

}  // namespace nirisk::clinical
