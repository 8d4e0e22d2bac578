#pragma once

#include "nirisk/clinical/records.hpp"
#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/spec.hpp"
#include "nirisk/eval/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nirisk::eval {

enum class Horizon {
  per_stay,  // one case per patient, scored by its highest daily risk
  per_day,   // one case per patient-day
};

// "per-stay" | "per-day"; throws InputError otherwise.
Horizon parse_horizon(std::string_view text);
const char* horizon_name(Horizon h);

struct Case {
  std::string patient_id;
  int day = 0;  // 0 for a per-stay case
  double probability = 0.0;
  bool predicted = false;
  bool actual = false;
};

struct Evaluation {
  Horizon horizon = Horizon::per_stay;
  MetricsReport report;
  std::vector<Case> cases;
  // Patients or days left out because their outcome is unknown.
  std::size_t unlabelled = 0;
};

// Scores every labelled patient (or day) with predict_trajectory.  Throws
// InputError when no labelled case remains.
Evaluation evaluate_model(const dbn::DbnSpec& spec, const std::vector<clinical::PatientRecord>& test_records,
                          const clinical::ClinicalSchema& schema, double threshold = kDefaultThreshold,
                          Horizon horizon = Horizon::per_stay);

Evaluation evaluate_dataset(const dbn::DbnSpec& spec, const clinical::ClinicalData& data,
                            double threshold = kDefaultThreshold, Horizon horizon = Horizon::per_stay);

pgm::json evaluation_to_json(const Evaluation& e);

// Observed against predicted counts over ten equal-width probability bins:
//   lower,upper,cases,predicted_yes,observed_yes
std::string histogram_csv(const std::vector<Case>& cases, double threshold);
void write_histogram(const std::filesystem::path& path, const std::vector<Case>& cases, double threshold);

}  // namespace nirisk::eval
