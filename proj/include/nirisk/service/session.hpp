#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/io.hpp"

#include <string>
#include <vector>

namespace nirisk::service {

struct Session {
  std::string patient_id;
  pgm::Assignment static_evidence;
  // days[0] is day 1.
  std::vector<pgm::Assignment> days;
  dbn::PredictionTrace trace;
  std::string created;  // UTC, ISO 8601
  std::string updated;

  dbn::EvidenceTimeline timeline() const { return {static_evidence, days}; }
};

pgm::json session_to_json(const Session& s);
// Throws FormatError.
Session session_from_json(const pgm::json& j);

// Current UTC time as "2024-01-31T12:00:00Z".
std::string utc_now();

}  // namespace nirisk::service
