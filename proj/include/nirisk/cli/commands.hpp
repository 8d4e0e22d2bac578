#pragma once

#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nirisk::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string subcommand;
  fs::path structure;
  fs::path fixed;
  fs::path daily;
  fs::path model;
  fs::path test;  // directory holding fixed.csv and daily.csv
  fs::path out;
  fs::path histogram;
  fs::path store = "nirisk-sessions.db";
  fs::path static_dir;
  std::vector<fs::path> inputs;  // predict: timeline JSON files
  std::string what;              // export: structure | ground-truth | schema | chain
  std::string matrix;            // "tn,fp,fn,tp"
  std::string horizon = "per-stay";
  std::string host = "127.0.0.1";
  double alpha = 1.0;
  double threshold = 0.5;
  std::uint64_t seed = 42;
  int patients = 0;
  int port = 8080;
};

// A DBN document, optionally carrying the clinical schema under "schema".
struct ModelFile {
  dbn::DbnSpec spec;
  std::optional<clinical::ClinicalSchema> schema;
  pgm::json document;
};

ModelFile load_model(const fs::path& path, pgm::Probabilities mode = pgm::Probabilities::required);
pgm::json model_document(const dbn::DbnSpec& spec, const std::optional<clinical::ClinicalSchema>& schema);

// Each command writes data to `out` or to files and diagnostics to `err`,
// and throws nirisk::Error subclasses on failure.
void cmd_learn(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_export(const RunConfig& cfg, std::ostream& out, std::ostream& err);
// Blocks until SIGINT or SIGTERM.
void cmd_serve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses arguments and runs one command.  Exit status: 0 on success, 1 on a
// runtime error, 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nirisk::cli
