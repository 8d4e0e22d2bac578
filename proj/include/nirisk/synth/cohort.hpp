#pragma once

#include "nirisk/clinical/records.hpp"
#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/spec.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace nirisk::synth {

struct CohortConfig {
  dbn::DbnSpec ground_truth;
  clinical::ClinicalSchema schema;
  int n_patients = 1;
  // stay_weights[k]: relative frequency of a stay of k + 1 days.
  std::vector<double> stay_weights;
  std::uint64_t seed = 0;
  // Entry years are drawn from [first_year, first_year + 2].
  int first_year = 2021;
};

// Ground truth and stay distribution used when none are given: the built-in
// clinical model with stays uniform over 3..10 days.
CohortConfig default_config(int n_patients, std::uint64_t seed, int stay_min = 3, int stay_max = 10);

// One simulated admission in schema states.
struct SampledPatient {
  pgm::Assignment fixed;
  std::vector<pgm::Assignment> days;
};

// Patient i is drawn from its own engine seeded with (seed, i).  The static
// slice is sampled first; when the schema derives a stay-length variable, the
// stay is then drawn from the weights restricted to that variable's bin,
// otherwise from the weights directly.  Days follow the template.
std::vector<SampledPatient> sample_cohort(const CohortConfig& cfg);

// Raw records whose discretization reproduces sample_cohort: ages uniform in
// their bin, entry dates in the sampled season, exit = entry + stay - 1, and
// ni_ever copied from the static result.
std::vector<clinical::PatientRecord> generate_cohort(const CohortConfig& cfg);

struct CohortFiles {
  std::filesystem::path fixed;
  std::filesystem::path daily;
  std::filesystem::path manifest;
};

// fixed.csv, daily.csv and manifest.json under `dir` (created if needed).
CohortFiles write_cohort(const std::filesystem::path& dir, const CohortConfig& cfg,
                         const std::vector<clinical::PatientRecord>& records);

}  // namespace nirisk::synth
