#pragma once

#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/learning.hpp"
#include "nirisk/dbn/spec.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nirisk::clinical {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

// One admission as read from the files, before discretization.
struct PatientRecord {
  std::string patient_id;
  // Raw cells of the fixed file keyed by column name; empty cells are absent.
  std::map<std::string, std::string> fixed;
  Date entry{};
  Date exit{};
  // days[0] is day 1 (the first 24h); each maps variable code -> raw value.
  std::vector<std::map<std::string, std::string>> days;

  // Calendar days touched by the stay: exit - entry + 1.
  int stay_days() const;
  // exit - entry in whole days.
  int length_of_stay() const;
};

struct Correction {
  std::string patient_id;
  std::string field;
  std::string reason;
};

// Rows of both files; rows_read == rows_kept + rows_dropped.
struct CleaningReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
  std::vector<Correction> corrections;
};

struct IngestResult {
  std::vector<PatientRecord> records;
  CleaningReport report;
};

// Read the fixed and daily CSV files.  Rows with unparseable values, states
// the schema does not declare, unknown patients, or days outside the stay are
// dropped and logged, never coerced.  Throws IoError for unreadable files and
// FormatError for a header that does not match.
IngestResult ingest(const std::filesystem::path& fixed_file, const std::filesystem::path& daily_file,
                    const ClinicalSchema& schema);

struct DiscreteRecord {
  std::string patient_id;
  pgm::Assignment fixed;
  std::vector<pgm::Assignment> days;
};

// Map every raw value onto a schema state.  Throws BinningError when a numeric
// value lies below every bin and SchemaMismatch for undeclared labels.
DiscreteRecord discretize(const PatientRecord& record, const ClinicalSchema& schema);

// Learning rows plus prediction timelines for a set of patients.
struct ClinicalData {
  dbn::SliceData slices;
  std::vector<std::string> patient_ids;
  // Result nodes removed.
  std::vector<dbn::EvidenceTimeline> timelines;
  // Daily outcome labels ("yes" from the first recorded infection day on).
  std::vector<std::vector<std::optional<bool>>> day_labels;
  // Patient-level outcome, absent when it cannot be told from the data.
  std::vector<std::optional<bool>> stay_labels;
};

ClinicalData to_dataset(const std::vector<DiscreteRecord>& records, const ClinicalSchema& schema);

// Writers for the two file formats, rows in record order.
void write_fixed_file(const std::filesystem::path& path, const std::vector<PatientRecord>& records);
void write_daily_file(const std::filesystem::path& path, const std::vector<PatientRecord>& records,
                      const ClinicalSchema& schema);

}  // namespace nirisk::clinical
