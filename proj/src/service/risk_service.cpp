#include "nirisk/service/risk_service.hpp"

#include "nirisk/dbn/io.hpp"

#include <cstdio>
#include <mutex>

namespace nirisk::service {

namespace {

constexpr const char* kModelKey = "model_version";

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

pgm::json arcs_json(const std::vector<dbn::Arc>& arcs) {
  pgm::json out = pgm::json::array();
  for (const auto& [from, to] : arcs) out.push_back({from, to});
  return out;
}

}  // namespace

std::string model_fingerprint(const pgm::json& model) {
  // FNV-1a over the compact dump
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : model.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RiskService::RiskService(dbn::DbnSpec model, std::shared_ptr<SessionStore> store, ServiceOptions options)
    : model_(std::move(model)), store_(std::move(store)), options_(std::move(options)) {
  model_.require_valid();
  if (!(options_.threshold >= 0.0 && options_.threshold <= 1.0)) throw RangeError("threshold must lie in [0, 1]");
  if (options_.model_version.empty()) options_.model_version = model_fingerprint(dbn::spec_to_json(model_));
  if (auto stored = store_->meta(kModelKey); stored && *stored != options_.model_version)
    throw InputError("session store was written with model " + *stored + ", not " + options_.model_version);
  store_->set_meta(kModelKey, options_.model_version);

  for (auto& s : store_->load_all()) {
    auto slot = std::make_shared<Slot>();
    slot->filter.emplace(model_, s.static_evidence);
    s.trace.entries.assign(1, {0, dbn::baseline(model_, s.static_evidence)});
    for (std::size_t d = 0; d < s.days.size(); ++d)
      s.trace.entries.push_back({static_cast<int>(d + 1), slot->filter->step(s.days[d])});
    slot->session = std::move(s);
    slots_.emplace(slot->session.patient_id, slot);
  }
}

std::shared_ptr<RiskService::Slot> RiskService::find(const std::string& patient_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = slots_.find(patient_id);
  if (it == slots_.end()) throw NotFound("no patient '" + patient_id + "'");
  return it->second;
}

void RiskService::check_fixed(const pgm::Assignment& fixed) const {
  const auto& st = model_.static_slice();
  for (const auto& [name, label] : fixed) {
    auto i = st.find(name);
    if (!i) throw ValidationError(name, "unknown admission variable '" + name + "'");
    if (model_.static_result_node() && name == *model_.static_result_node())
      throw ValidationError(name, "'" + name + "' is the outcome and cannot be supplied");
    if (!st.variable(*i).find_state(label))
      throw ValidationError(name, "state '" + label + "' is not a state of '" + name + "'");
  }
}

void RiskService::check_day(const pgm::Assignment& observations) const {
  for (const auto& [name, label] : observations) {
    auto j = model_.find_temporal(name);
    if (!j) throw ValidationError(name, "unknown daily variable '" + name + "'");
    if (*j == model_.result_index())
      throw ValidationError(name, "'" + name + "' is the outcome and cannot be supplied");
    if (!model_.temporal_variables()[*j].find_state(label))
      throw ValidationError(name, "state '" + label + "' is not a state of '" + name + "'");
  }
}

std::string RiskService::next_id() {
  std::string id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof buf, "patient-%06lld", ++counter_);
    id = buf;
  } while (slots_.count(id));
  return id;
}

Risk RiskService::create_patient(const pgm::Assignment& fixed, const std::string& patient_id) {
  check_fixed(fixed);
  if (!patient_id.empty() && !valid_id(patient_id))
    throw ValidationError("patient_id", "patient_id must be 1-64 characters from [A-Za-z0-9._-]");

  auto slot = std::make_shared<Slot>();
  slot->filter.emplace(model_, fixed);
  const double p0 = dbn::baseline(model_, fixed);

  std::unique_lock lock(map_mutex_);
  std::string id = patient_id.empty() ? next_id() : patient_id;
  if (slots_.count(id)) throw Conflict("patient '" + id + "' already exists");
  auto& s = slot->session;
  s.patient_id = id;
  s.static_evidence = fixed;
  s.trace.entries = {{0, p0}};
  s.created = s.updated = utc_now();
  store_->put(s);
  slots_.emplace(id, slot);
  return {id, 0, p0};
}

Risk RiskService::submit_day(const std::string& patient_id, int day, const pgm::Assignment& observations) {
  auto slot = find(patient_id);
  std::unique_lock lock(slot->mutex);
  const int expected = static_cast<int>(slot->session.days.size()) + 1;
  if (day != expected)
    throw Conflict("patient '" + patient_id + "' expects day " + std::to_string(expected) + ", got day " +
                   std::to_string(day));
  check_day(observations);

  auto filter = *slot->filter;
  const double p = filter.step(observations);
  Session next = slot->session;
  next.days.push_back(observations);
  next.trace.entries.push_back({day, p});
  next.updated = utc_now();
  store_->put(next);
  slot->session = std::move(next);
  slot->filter = std::move(filter);
  return {patient_id, day, p};
}

dbn::PredictionTrace RiskService::trajectory(const std::string& patient_id) const {
  auto slot = find(patient_id);
  std::shared_lock lock(slot->mutex);
  return slot->session.trace;
}

Session RiskService::session(const std::string& patient_id) const {
  auto slot = find(patient_id);
  std::shared_lock lock(slot->mutex);
  return slot->session;
}

Risk RiskService::what_if(const std::string& patient_id, const pgm::Assignment& observations) const {
  auto slot = find(patient_id);
  check_day(observations);
  std::shared_lock lock(slot->mutex);
  auto filter = *slot->filter;
  const int day = static_cast<int>(slot->session.days.size()) + 1;
  return {patient_id, day, filter.step(observations)};
}

std::size_t RiskService::session_count() const {
  std::shared_lock lock(map_mutex_);
  return slots_.size();
}

pgm::json RiskService::model_summary() const {
  const auto& st = model_.static_slice();
  pgm::json statics = pgm::json::array();
  for (int i = 0; i < st.size(); ++i)
    statics.push_back(
        {{"name", st.variable(i).name}, {"states", st.variable(i).states}, {"parents", st.cpt(i).parents}});
  pgm::json temporal = pgm::json::array();
  const auto& vars = model_.temporal_variables();
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    pgm::json v = {{"name", vars[j].name}, {"states", vars[j].states}, {"parents", model_.cpt(j).parents}};
    if (model_.has_previous_parent(j)) v["initial_parents"] = model_.cpt(j, true).parents;
    temporal.push_back(std::move(v));
  }
  return {{"version", options_.model_version},
          {"threshold", options_.threshold},
          {"result_node", model_.result_node()},
          {"static_result_node",
           model_.static_result_node() ? pgm::json(*model_.static_result_node()) : pgm::json(nullptr)},
          {"static_variables", statics},
          {"temporal_variables", temporal},
          {"inter_slice_arcs", arcs_json(model_.inter_slice_arcs())},
          {"bridge_arcs", arcs_json(model_.bridge_arcs())},
          {"schema", options_.schema ? *options_.schema : pgm::json(nullptr)}};
}

}  // namespace nirisk::service
