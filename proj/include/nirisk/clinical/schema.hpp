#pragma once

#include "nirisk/pgm/io.hpp"
#include "nirisk/pgm/network.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nirisk::clinical {

// How a fixed variable's state is obtained from the raw admission record.
struct Derivation {
  enum class Kind {
    categorical,  // raw cell is the state label
    bins,         // numeric cell binned into half-open [edges[k], edges[k+1])
    season,       // month of a date cell -> winter/spring/summer/autumn
    stay_length,  // exit_date - entry_date in whole days, then binned
  };
  Kind kind = Kind::categorical;
  std::string source;  // column of the fixed file
  std::vector<double> edges;
};

struct FixedVariable {
  pgm::Variable variable;
  Derivation derive;
};

// Variables of the nosocomial-infection model and the rules mapping raw
// admission and daily data onto their states.
struct ClinicalSchema {
  std::vector<FixedVariable> fixed;
  std::vector<pgm::Variable> temporal;
  std::string result = "result";      // fixed outcome, fed by ni_ever
  std::string result_t = "result_t";  // daily outcome

  std::vector<pgm::Variable> fixed_variables() const;
  const FixedVariable* find_fixed(std::string_view name) const;
  const pgm::Variable* find_temporal(std::string_view name) const;
};

inline constexpr int kActs = 10;
inline constexpr int kInfectiousExams = 30;

// The built-in schema: fixed {sex, age1, periode_entr, orig, detorig,
// priseAnti, knaus, cissue, diag, ant, dsj, result}; daily {act_1..act_10,
// examinf_1..examinf_30, sens, result_t}, plus cissue_t when requested.
ClinicalSchema default_schema(bool with_daily_cissue = false);

// Columns of the fixed admission file, in order.
const std::vector<std::string>& fixed_file_header();
// Columns of the long-format daily file, in order.
const std::vector<std::string>& daily_file_header();

pgm::json schema_to_json(const ClinicalSchema& schema);
ClinicalSchema schema_from_json(const pgm::json& j);
ClinicalSchema load_schema(const std::filesystem::path& path);

// Index of the half-open bin holding `value`, or -1 below the first edge.
int bin_index(const std::vector<double>& edges, double value);

// Month (1-12) -> "winter" | "spring" | "summer" | "autumn".
const char* season_of_month(unsigned month);

}  // namespace nirisk::clinical
