#include "nirisk/service/session.hpp"

#include "nirisk/dbn/io.hpp"
#include "nirisk/errors.hpp"

#include <chrono>
#include <ctime>

namespace nirisk::service {

namespace {

pgm::Assignment assignment_from_json(const pgm::json& j, const char* what) {
  if (!j.is_object()) throw FormatError(std::string(what) + " must be an object");
  pgm::Assignment a;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw FormatError(std::string(what) + ": value of '" + k + "' must be a string");
    a.emplace(k, v.get<std::string>());
  }
  return a;
}

}  // namespace

pgm::json session_to_json(const Session& s) {
  pgm::json days = pgm::json::array();
  for (const auto& d : s.days) days.push_back(d);
  return {{"patient_id", s.patient_id},     {"static", s.static_evidence},
          {"days", days},                   {"trace", dbn::trace_to_json(s.trace)},
          {"created", s.created},           {"updated", s.updated}};
}

Session session_from_json(const pgm::json& j) {
  try {
    Session s;
    s.patient_id = j.at("patient_id").get<std::string>();
    s.static_evidence = assignment_from_json(j.at("static"), "static");
    for (const auto& d : j.at("days")) s.days.push_back(assignment_from_json(d, "day"));
    for (const auto& e : j.at("trace"))
      s.trace.entries.push_back({e.at("day").get<int>(), e.at("probability").get<double>()});
    s.created = j.at("created").get<std::string>();
    s.updated = j.at("updated").get<std::string>();
    return s;
  } catch (const pgm::json::exception& e) {
    throw FormatError(std::string("stored session: ") + e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace nirisk::service
