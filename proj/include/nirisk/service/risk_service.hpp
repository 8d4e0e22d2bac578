#pragma once

#include "nirisk/dbn/inference.hpp"
#include "nirisk/dbn/spec.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/service/session.hpp"
#include "nirisk/service/store.hpp"

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

namespace nirisk::service {

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

// Rejected request content, optionally naming the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what) : Error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ServiceOptions {
  double threshold = 0.5;
  // Identifies the loaded model; stored sessions from another model are
  // refused at startup.
  std::string model_version;
  std::optional<pgm::json> schema;
};

struct Risk {
  std::string patient_id;
  int day = 0;
  double probability = 0.0;
};

// Per-patient filtering sessions over one immutable model.
//
// Requests for different patients run concurrently; writes to one patient
// are serialized and reads share a lock.  Every accepted write is persisted
// before it becomes visible.
class RiskService {
 public:
  // Reloads every stored session.  Throws InputError when the store was
  // written with a different model and SpecError for an invalid model.
  RiskService(dbn::DbnSpec model, std::shared_ptr<SessionStore> store, ServiceOptions options = {});

  // Empty `patient_id` asks for a generated one.  Throws ValidationError,
  // Conflict for an existing id, ImpossibleEvidence.
  Risk create_patient(const pgm::Assignment& fixed, const std::string& patient_id = "");
  // `day` must be one past the last accepted day, otherwise Conflict.
  Risk submit_day(const std::string& patient_id, int day, const pgm::Assignment& observations);
  dbn::PredictionTrace trajectory(const std::string& patient_id) const;
  // Risk for a hypothetical next day; the session is left untouched.
  Risk what_if(const std::string& patient_id, const pgm::Assignment& observations) const;
  Session session(const std::string& patient_id) const;

  const dbn::DbnSpec& model() const { return model_; }
  const ServiceOptions& options() const { return options_; }
  // Structure summary for clients.
  pgm::json model_summary() const;
  std::size_t session_count() const;

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    Session session;
    std::optional<dbn::ForwardFilter> filter;
  };

  std::shared_ptr<Slot> find(const std::string& patient_id) const;
  void check_fixed(const pgm::Assignment& fixed) const;
  void check_day(const pgm::Assignment& observations) const;
  std::string next_id();

  dbn::DbnSpec model_;
  std::shared_ptr<SessionStore> store_;
  ServiceOptions options_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  long long counter_ = 0;
};

// Short stable hash of a model document, used as its version.
std::string model_fingerprint(const pgm::json& model);

}  // namespace nirisk::service
