#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/io.hpp"

#include <filesystem>

namespace nirisk::dbn {

using pgm::json;

// {"static_slice": <network>,
//  "slice_template": {"variables":[...], "cpts":[...], "initial_cpts":[...]},
//  "inter_slice_arcs": [["from","to"]], "bridge_arcs": [["static","temporal"]],
//  "result_node": "...", "static_result_node": "..."}
json spec_to_json(const DbnSpec& spec);
// With Probabilities::optional, tables without rows load as uniform, which
// is how structure-only files feed the learner.
DbnSpec spec_from_json(const json& j, pgm::Probabilities mode = pgm::Probabilities::required);

DbnSpec load_spec(const std::filesystem::path& path, pgm::Probabilities mode = pgm::Probabilities::required);

json timeline_to_json(const EvidenceTimeline& timeline);
// {"static": {var: state}, "days": [{var: state}, ...]}
EvidenceTimeline timeline_from_json(const json& j);

json trace_to_json(const PredictionTrace& trace);

}  // namespace nirisk::dbn
