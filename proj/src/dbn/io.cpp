#include "nirisk/dbn/io.hpp"

#include "nirisk/errors.hpp"

namespace nirisk::dbn {

namespace {

json arcs_to_json(const std::vector<Arc>& arcs) {
  json out = json::array();
  for (const auto& [from, to] : arcs) out.push_back(json::array({from, to}));
  return out;
}

std::vector<Arc> arcs_from_json(const json& j, const char* key) {
  std::vector<Arc> arcs;
  if (!j.contains(key)) return arcs;
  const auto& a = j.at(key);
  if (!a.is_array()) throw FormatError(std::string("\"") + key + "\" must be an array");
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw FormatError(std::string("\"") + key + "\" entries must be [from, to] string pairs");
    arcs.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return arcs;
}

pgm::Assignment assignment_from_json(const json& j, const std::string& where) {
  pgm::Assignment a;
  if (j.is_null()) return a;
  if (!j.is_object()) throw FormatError(where + " must be an object of variable: state");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw FormatError(where + ": state of '" + k + "' must be a string");
    a.emplace(k, v.get<std::string>());
  }
  return a;
}

}  // namespace

json spec_to_json(const DbnSpec& spec) {
  auto lookup = [&](const std::string& token) { return spec.lookup(token); };
  json tvars = json::array();
  for (const auto& v : spec.temporal_variables()) tvars.push_back(pgm::variable_to_json(v));
  json cpts = json::array(), initial = json::array();
  for (const auto& c : spec.slice().cpts) cpts.push_back(pgm::cpt_to_json(c, lookup));
  for (const auto& c : spec.slice().initial_cpts) initial.push_back(pgm::cpt_to_json(c, lookup));
  json j = {
      {"static_slice", pgm::network_to_json(spec.static_slice())},
      {"slice_template", {{"variables", tvars}, {"cpts", cpts}, {"initial_cpts", initial}}},
      {"inter_slice_arcs", arcs_to_json(spec.inter_slice_arcs())},
      {"bridge_arcs", arcs_to_json(spec.bridge_arcs())},
      {"result_node", spec.result_node()},
  };
  if (spec.static_result_node()) j["static_result_node"] = *spec.static_result_node();
  return j;
}

DbnSpec spec_from_json(const json& j, pgm::Probabilities mode) {
  if (!j.is_object()) throw FormatError("DBN spec must be a JSON object");
  pgm::Network st;
  if (j.contains("static_slice")) st = pgm::network_from_json(j.at("static_slice"), mode);
  if (!j.contains("slice_template")) throw FormatError("DBN spec: missing \"slice_template\"");
  const auto& jt = j.at("slice_template");
  if (!jt.is_object() || !jt.contains("variables") || !jt.at("variables").is_array())
    throw FormatError("slice_template: missing \"variables\"");

  SliceTemplate slice;
  for (const auto& v : jt.at("variables")) slice.variables.push_back(pgm::variable_from_json(v));
  auto lookup = [&](const std::string& token) -> const pgm::Variable* {
    for (const auto& v : slice.variables)
      if (v.name == token || previous_token(v.name) == token) return &v;
    if (auto i = st.find(token)) return &st.variable(*i);
    return nullptr;
  };
  for (const char* key : {"cpts", "initial_cpts"}) {
    if (!jt.contains(key)) continue;
    if (!jt.at(key).is_array()) throw FormatError(std::string("slice_template: \"") + key + "\" must be an array");
    auto& dst = std::string(key) == "cpts" ? slice.cpts : slice.initial_cpts;
    for (const auto& c : jt.at(key)) dst.push_back(pgm::cpt_from_json(c, lookup, mode));
  }
  if (!j.contains("result_node") || !j.at("result_node").is_string())
    throw FormatError("DBN spec: missing \"result_node\"");
  std::optional<std::string> static_result;
  if (j.contains("static_result_node")) static_result = j.at("static_result_node").get<std::string>();

  DbnSpec spec(std::move(st), std::move(slice), arcs_from_json(j, "inter_slice_arcs"), arcs_from_json(j, "bridge_arcs"),
               j.at("result_node").get<std::string>(), static_result);
  spec.require_valid();
  return spec;
}

DbnSpec load_spec(const std::filesystem::path& path, pgm::Probabilities mode) {
  return spec_from_json(pgm::read_json_file(path), mode);
}

json timeline_to_json(const EvidenceTimeline& timeline) {
  json days = json::array();
  for (const auto& d : timeline.days) days.push_back(json(d));
  return json{{"static", json(timeline.static_evidence)}, {"days", days}};
}

EvidenceTimeline timeline_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("timeline must be a JSON object");
  EvidenceTimeline tl;
  if (j.contains("static")) tl.static_evidence = assignment_from_json(j.at("static"), "static");
  if (j.contains("days")) {
    if (!j.at("days").is_array()) throw FormatError("\"days\" must be an array");
    int d = 1;
    for (const auto& day : j.at("days")) tl.days.push_back(assignment_from_json(day, "day " + std::to_string(d++)));
  }
  return tl;
}

json trace_to_json(const PredictionTrace& trace) {
  json out = json::array();
  for (const auto& e : trace.entries) out.push_back(json{{"day", e.day}, {"probability", e.probability}});
  return out;
}

}  // namespace nirisk::dbn
