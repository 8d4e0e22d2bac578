#include "nirisk/clinical/schema.hpp"

#include "nirisk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nirisk::clinical {

namespace {

pgm::Variable binary(std::string name) { return {std::move(name), {"yes", "no"}}; }

const char* kind_name(Derivation::Kind k) {
  switch (k) {
    case Derivation::Kind::categorical:
      return "categorical";
    case Derivation::Kind::bins:
      return "bins";
    case Derivation::Kind::season:
      return "season";
    case Derivation::Kind::stay_length:
      return "stay_length";
  }
  return "categorical";
}

Derivation::Kind kind_from(const std::string& s) {
  if (s == "categorical") return Derivation::Kind::categorical;
  if (s == "bins") return Derivation::Kind::bins;
  if (s == "season") return Derivation::Kind::season;
  if (s == "stay_length") return Derivation::Kind::stay_length;
  throw FormatError("schema: unknown derivation kind '" + s + "'");
}

}  // namespace

std::vector<pgm::Variable> ClinicalSchema::fixed_variables() const {
  std::vector<pgm::Variable> out;
  for (const auto& f : fixed) out.push_back(f.variable);
  return out;
}

const FixedVariable* ClinicalSchema::find_fixed(std::string_view name) const {
  for (const auto& f : fixed)
    if (f.variable.name == name) return &f;
  return nullptr;
}

const pgm::Variable* ClinicalSchema::find_temporal(std::string_view name) const {
  for (const auto& v : temporal)
    if (v.name == name) return &v;
  return nullptr;
}

ClinicalSchema default_schema(bool with_daily_cissue) {
  using K = Derivation::Kind;
  ClinicalSchema s;
  auto cat = [&](std::string name, std::vector<std::string> states, std::string source = {}) {
    if (source.empty()) source = name;
    s.fixed.push_back({{std::move(name), std::move(states)}, {K::categorical, std::move(source), {}}});
  };
  cat("sex", {"M", "F"});
  s.fixed.push_back({{"age1", {"0-15", "16-40", "41-65", "66+"}}, {K::bins, "age", {0, 16, 41, 66}}});
  s.fixed.push_back({{"periode_entr", {"winter", "spring", "summer", "autumn"}}, {K::season, "entry_date", {}}});
  cat("orig", {"home", "ward", "other_hospital"});
  cat("detorig", {"emergency", "surgery", "medicine", "other"});
  cat("priseAnti", {"yes", "no"});
  cat("knaus", {"A", "B", "C", "D"});
  cat("cissue", {"survived", "dead"});
  cat("diag", {"medical", "surgical", "trauma"});
  cat("ant", {"yes", "no"});
  s.fixed.push_back({{"dsj", {"0-2d", "3-7d", "8-14d", "15d+"}}, {K::stay_length, "", {0, 3, 8, 15}}});
  cat("result", {"yes", "no"}, "ni_ever");

  for (int i = 1; i <= kActs; ++i) s.temporal.push_back(binary("act_" + std::to_string(i)));
  for (int i = 1; i <= kInfectiousExams; ++i) s.temporal.push_back(binary("examinf_" + std::to_string(i)));
  s.temporal.push_back({"sens", {"sensitive", "resistant", "not_tested"}});
  if (with_daily_cissue) s.temporal.push_back({"cissue_t", {"survived", "dead"}});
  s.temporal.push_back(binary("result_t"));
  return s;
}

const std::vector<std::string>& fixed_file_header() {
  static const std::vector<std::string> h{"patient_id", "sex",  "age", "entry_date", "exit_date", "orig",   "detorig",
                                          "priseAnti",  "knaus", "diag", "ant",       "cissue",    "ni_ever"};
  return h;
}

const std::vector<std::string>& daily_file_header() {
  static const std::vector<std::string> h{"patient_id", "day", "variable", "value"};
  return h;
}

int bin_index(const std::vector<double>& edges, double value) {
  if (std::isnan(value) || edges.empty() || value < edges.front()) return -1;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<int>(it - edges.begin()) - 1;
}

const char* season_of_month(unsigned month) {
  switch (month) {
    case 12:
    case 1:
    case 2:
      return "winter";
    case 3:
    case 4:
    case 5:
      return "spring";
    case 6:
    case 7:
    case 8:
      return "summer";
    default:
      return "autumn";
  }
}

pgm::json schema_to_json(const ClinicalSchema& schema) {
  pgm::json fixed = pgm::json::array();
  for (const auto& f : schema.fixed) {
    auto j = pgm::variable_to_json(f.variable);
    j["derive"] = {{"kind", kind_name(f.derive.kind)}};
    if (!f.derive.source.empty()) j["derive"]["source"] = f.derive.source;
    if (!f.derive.edges.empty()) j["derive"]["edges"] = f.derive.edges;
    fixed.push_back(j);
  }
  pgm::json temporal = pgm::json::array();
  for (const auto& v : schema.temporal) temporal.push_back(pgm::variable_to_json(v));
  return {{"fixed_variables", fixed}, {"temporal_variables", temporal}, {"result", schema.result},
          {"result_t", schema.result_t}};
}

ClinicalSchema schema_from_json(const pgm::json& j) {
  if (!j.is_object() || !j.contains("fixed_variables") || !j.contains("temporal_variables"))
    throw FormatError("schema needs \"fixed_variables\" and \"temporal_variables\"");
  ClinicalSchema s;
  for (const auto& jf : j.at("fixed_variables")) {
    FixedVariable f{pgm::variable_from_json(jf), {}};
    f.derive.source = f.variable.name;
    if (jf.contains("derive")) {
      const auto& d = jf.at("derive");
      f.derive.kind = kind_from(d.value("kind", "categorical"));
      f.derive.source = d.value("source", f.derive.kind == Derivation::Kind::stay_length ? "" : f.variable.name);
      if (d.contains("edges")) f.derive.edges = d.at("edges").get<std::vector<double>>();
    }
    const bool binned = f.derive.kind == Derivation::Kind::bins || f.derive.kind == Derivation::Kind::stay_length;
    if (binned) {
      if (static_cast<int>(f.derive.edges.size()) != f.variable.cardinality())
        throw FormatError("schema: '" + f.variable.name + "' needs one bin edge per state");
      if (!std::is_sorted(f.derive.edges.begin(), f.derive.edges.end()) ||
          std::adjacent_find(f.derive.edges.begin(), f.derive.edges.end()) != f.derive.edges.end())
        throw FormatError("schema: bin edges of '" + f.variable.name + "' must be strictly ascending");
    }
    s.fixed.push_back(std::move(f));
  }
  for (const auto& jt : j.at("temporal_variables")) s.temporal.push_back(pgm::variable_from_json(jt));
  s.result = j.value("result", "result");
  s.result_t = j.value("result_t", "result_t");
  if (!s.find_fixed(s.result)) throw FormatError("schema: result variable '" + s.result + "' is not fixed");
  if (!s.find_temporal(s.result_t)) throw FormatError("schema: '" + s.result_t + "' is not a temporal variable");
  return s;
}

ClinicalSchema load_schema(const std::filesystem::path& path) { return schema_from_json(pgm::read_json_file(path)); }

}  // namespace nirisk::clinical
