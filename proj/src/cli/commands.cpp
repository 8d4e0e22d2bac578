#include "nirisk/cli/commands.hpp"

#include "nirisk/clinical/model.hpp"
#include "nirisk/clinical/records.hpp"
#include "nirisk/dbn/examples.hpp"
#include "nirisk/dbn/inference.hpp"
#include "nirisk/dbn/io.hpp"
#include "nirisk/dbn/learning.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/eval/evaluate.hpp"
#include "nirisk/service/http.hpp"
#include "nirisk/synth/cohort.hpp"

#include <CLI11.hpp>

#include <pthread.h>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace nirisk::cli {

namespace {

using pgm::json;

void require_file(const fs::path& p, const char* flag) {
  if (p.empty()) throw InputError(std::string(flag) + " is required");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw IoError(std::string(flag) + ": no such file " + p.string());
}

void require_out(const fs::path& p) {
  if (p.empty()) throw InputError("--out is required");
  const auto parent = p.parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec))
    throw IoError("--out: directory " + parent.string() + " does not exist");
}

// Writes pretty JSON to `path`, or to `out` when the path is empty.
void emit(const json& j, const fs::path& path, std::ostream& out) {
  if (path.empty())
    out << j.dump(2) << '\n';
  else
    pgm::write_json_file(path, j);
}

clinical::ClinicalSchema schema_or_default(const ModelFile& m) {
  return m.schema ? *m.schema : clinical::default_schema();
}

struct RecordFiles {
  fs::path fixed, daily;
};

RecordFiles record_files(const RunConfig& cfg) {
  RecordFiles f{cfg.fixed, cfg.daily};
  if (!cfg.test.empty()) {
    f = {cfg.test / "fixed.csv", cfg.test / "daily.csv"};
    require_file(f.fixed, "--test");
    require_file(f.daily, "--test");
  } else {
    require_file(f.fixed, "--fixed");
    require_file(f.daily, "--daily");
  }
  return f;
}

std::vector<clinical::PatientRecord> read_records(const RecordFiles& files, const clinical::ClinicalSchema& schema,
                                                  std::ostream& err) {
  auto res = clinical::ingest(files.fixed, files.daily, schema);
  const auto& rep = res.report;
  for (const auto& c : rep.corrections)
    err << "dropped row (patient " << (c.patient_id.empty() ? "?" : c.patient_id) << ", " << c.field
        << "): " << c.reason << '\n';
  err << "read " << rep.rows_read << " rows, kept " << rep.rows_kept << ", dropped " << rep.rows_dropped << '\n';
  return std::move(res.records);
}

clinical::ClinicalData read_dataset(const RecordFiles& files, const clinical::ClinicalSchema& schema,
                                    std::ostream& err) {
  std::vector<clinical::DiscreteRecord> discrete;
  for (const auto& r : read_records(files, schema, err)) discrete.push_back(clinical::discretize(r, schema));
  return clinical::to_dataset(discrete, schema);
}

json fit_report_json(const pgm::FitReport& r) {
  json fallbacks = json::array();
  for (const auto& f : r.fallbacks) fallbacks.push_back({{"table", f.child}, {"given", f.given}});
  json counted = json::object();
  for (const auto& [table, n] : r.counted) counted[table] = n;
  return {{"data_rows", r.data_rows}, {"rows_counted", counted}, {"uniform_fallbacks", fallbacks}};
}

eval::ConfusionMatrix parse_matrix(const std::string& text) {
  std::vector<std::int64_t> cells;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw InputError("--matrix: '" + part + "' is not an integer");
    cells.push_back(v);
  }
  if (cells.size() != 4) throw InputError("--matrix expects tn,fp,fn,tp");
  return {cells[0], cells[1], cells[2], cells[3]};
}

std::vector<std::pair<std::string, dbn::EvidenceTimeline>> read_timelines(const fs::path& path) {
  auto j = pgm::read_json_file(path);
  std::vector<std::pair<std::string, dbn::EvidenceTimeline>> out;
  auto one = [&](const json& item) {
    std::string id = std::to_string(out.size() + 1);
    if (item.is_object() && item.contains("patient_id")) {
      if (!item.at("patient_id").is_string()) throw FormatError(path.string() + ": patient_id must be a string");
      id = item.at("patient_id").get<std::string>();
    }
    out.emplace_back(id, dbn::timeline_from_json(item));
  };
  if (j.is_array()) {
    for (const auto& item : j) one(item);
  } else {
    one(j);
  }
  return out;
}

}  // namespace

ModelFile load_model(const fs::path& path, pgm::Probabilities mode) {
  require_file(path, "model");
  ModelFile m;
  m.document = pgm::read_json_file(path);
  m.spec = dbn::spec_from_json(m.document, mode);
  if (m.document.is_object() && m.document.contains("schema"))
    m.schema = clinical::schema_from_json(m.document.at("schema"));
  return m;
}

json model_document(const dbn::DbnSpec& spec, const std::optional<clinical::ClinicalSchema>& schema) {
  auto j = dbn::spec_to_json(spec);
  if (schema) j["schema"] = clinical::schema_to_json(*schema);
  return j;
}

void cmd_learn(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_file(cfg.fixed, "--fixed");
  require_file(cfg.daily, "--daily");
  require_out(cfg.out);
  if (!(cfg.alpha >= 0)) throw InputError("--alpha must be non-negative");

  dbn::DbnSpec structure;
  clinical::ClinicalSchema schema;
  if (cfg.structure.empty()) {
    schema = clinical::default_schema();
    structure = clinical::default_structure(schema);
  } else {
    auto m = load_model(cfg.structure, pgm::Probabilities::optional);
    schema = schema_or_default(m);
    structure = m.spec;
  }
  structure.require_valid();

  auto data = read_dataset({cfg.fixed, cfg.daily}, schema, err);
  auto fit = dbn::fit_dbn(structure, data.slices, cfg.alpha);
  pgm::write_json_file(cfg.out, model_document(fit.spec, schema));

  json report = {{"model", cfg.out.string()},
                 {"alpha", cfg.alpha},
                 {"patients", data.patient_ids.size()},
                 {"static_rows", data.slices.static_rows.rows()},
                 {"slice_rows", data.slices.slice_rows.rows()},
                 {"static_tables", fit_report_json(fit.report.static_report)},
                 {"slice_tables", fit_report_json(fit.report.slice_report)}};
  out << report.dump(2) << '\n';
  const auto fallbacks = fit.report.static_report.fallbacks.size() + fit.report.slice_report.fallbacks.size();
  if (fallbacks) err << fallbacks << " table rows had no data and were set uniform\n";
}

void cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto m = load_model(cfg.model);
  if (!cfg.out.empty()) require_out(cfg.out);
  std::vector<std::pair<std::string, dbn::EvidenceTimeline>> patients;
  if (!cfg.inputs.empty()) {
    for (const auto& p : cfg.inputs) require_file(p, "input");
    for (const auto& p : cfg.inputs)
      for (auto& item : read_timelines(p)) patients.push_back(std::move(item));
  } else {
    if (cfg.fixed.empty() && cfg.daily.empty()) throw InputError("give timeline files or --fixed and --daily");
    auto data = read_dataset(record_files(cfg), schema_or_default(m), err);
    for (std::size_t i = 0; i < data.timelines.size(); ++i)
      patients.emplace_back(data.patient_ids[i], data.timelines[i]);
  }
  json result = json::array();
  for (const auto& [id, tl] : patients)
    result.push_back({{"patient_id", id}, {"trajectory", dbn::trace_to_json(dbn::predict_trajectory(m.spec, tl))}});
  emit(result, cfg.out, out);
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.out.empty()) require_out(cfg.out);
  if (!cfg.histogram.empty()) require_out(cfg.histogram);
  eval::classify(0.0, cfg.threshold);
  json j;
  std::string table;
  if (!cfg.matrix.empty()) {
    auto report = eval::metrics(parse_matrix(cfg.matrix), cfg.threshold);
    j = eval::metrics_to_json(report);
    table = eval::metrics_table(report);
    if (!cfg.histogram.empty()) err << "--histogram needs a model and test records; skipped\n";
  } else {
    auto m = load_model(cfg.model);
    auto data = read_dataset(record_files(cfg), schema_or_default(m), err);
    auto e = eval::evaluate_dataset(m.spec, data, cfg.threshold, eval::parse_horizon(cfg.horizon));
    if (e.unlabelled) err << e.unlabelled << " cases without a known outcome were skipped\n";
    j = eval::evaluation_to_json(e);
    table = eval::metrics_table(e.report);
    if (!cfg.histogram.empty()) eval::write_histogram(cfg.histogram, e.cases, cfg.threshold);
  }
  out << table;
  if (!cfg.out.empty()) pgm::write_json_file(cfg.out, j);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.out.empty()) throw InputError("--out is required");
  if (cfg.patients < 1) throw InputError("--patients must be at least 1");
  auto sc = synth::default_config(cfg.patients, cfg.seed);
  if (!cfg.model.empty()) {
    auto m = load_model(cfg.model);
    sc.ground_truth = m.spec;
    sc.schema = schema_or_default(m);
  }
  auto files = synth::write_cohort(cfg.out, sc, synth::generate_cohort(sc));
  out << json{{"fixed", files.fixed.string()}, {"daily", files.daily.string()},
              {"manifest", files.manifest.string()}, {"patients", cfg.patients}, {"seed", cfg.seed}}
             .dump(2)
      << '\n';
}

void cmd_export(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.out.empty()) require_out(cfg.out);
  const auto schema = clinical::default_schema();
  json j;
  if (cfg.what == "structure")
    j = model_document(clinical::default_structure(schema), schema);
  else if (cfg.what == "ground-truth")
    j = model_document(clinical::ground_truth_spec(schema, clinical::uniform_stay_weights(3, 10)), schema);
  else if (cfg.what == "schema")
    j = clinical::schema_to_json(schema);
  else if (cfg.what == "chain")
    j = model_document(dbn::chain_spec(), std::nullopt);
  else
    throw InputError("export: unknown item '" + cfg.what + "'");
  emit(j, cfg.out, out);
}

void cmd_serve(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  auto m = load_model(cfg.model);
  if (!cfg.static_dir.empty() && !fs::is_directory(cfg.static_dir))
    throw IoError("--static: no such directory " + cfg.static_dir.string());
  service::ServiceOptions opts;
  opts.threshold = cfg.threshold;
  opts.model_version = service::model_fingerprint(m.document);
  if (m.schema) opts.schema = clinical::schema_to_json(*m.schema);
  service::RiskService svc(m.spec, std::make_shared<service::SessionStore>(cfg.store), opts);

  std::optional<fs::path> static_dir;
  if (!cfg.static_dir.empty()) static_dir = cfg.static_dir;
  service::HttpServer server(svc, static_dir);
  const int port = server.bind(cfg.host, cfg.port);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });

  err << "serving model " << opts.model_version << " on http://" << cfg.host << ":" << port << std::endl;
  server.listen();
  pthread_kill(watcher.native_handle(), SIGUSR1);
  watcher.join();
  err << "stopped" << std::endl;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Daily nosocomial infection risk from a dynamic Bayesian network", "nirisk"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* learn = app.add_subcommand("learn", "Fit model tables from admission and daily records");
  learn->add_option("--structure", cfg.structure, "Structure file (tables optional); built-in structure if omitted");
  learn->add_option("--fixed", cfg.fixed, "Admission CSV")->required();
  learn->add_option("--daily", cfg.daily, "Daily observation CSV")->required();
  learn->add_option("--alpha", cfg.alpha, "Laplace smoothing pseudo-count")->capture_default_str();
  learn->add_option("--out", cfg.out, "Model file to write")->required();

  auto* predict = app.add_subcommand("predict", "Daily risk trajectories for patients");
  predict->add_option("--model", cfg.model, "Model file")->required();
  predict->add_option("records", cfg.inputs, "Timeline JSON files");
  predict->add_option("--fixed", cfg.fixed, "Admission CSV");
  predict->add_option("--daily", cfg.daily, "Daily observation CSV");
  predict->add_option("--out", cfg.out, "Write the JSON here instead of standard output");

  auto* evaluate = app.add_subcommand("evaluate", "Confusion matrix and metrics on a test set");
  evaluate->add_option("--model", cfg.model, "Model file");
  evaluate->add_option("--test", cfg.test, "Directory with fixed.csv and daily.csv");
  evaluate->add_option("--fixed", cfg.fixed, "Admission CSV");
  evaluate->add_option("--daily", cfg.daily, "Daily observation CSV");
  evaluate->add_option("--threshold", cfg.threshold, "Alarm threshold, p >= threshold is positive")
      ->capture_default_str();
  evaluate->add_option("--horizon", cfg.horizon, "per-stay or per-day")->capture_default_str();
  evaluate->add_option("--matrix", cfg.matrix, "Score a given matrix tn,fp,fn,tp instead of a model");
  evaluate->add_option("--histogram", cfg.histogram, "Write observed vs predicted counts as CSV");
  evaluate->add_option("--out", cfg.out, "Write the metrics JSON here");

  auto* simulate = app.add_subcommand("simulate", "Sample a synthetic cohort from a ground-truth model");
  simulate->add_option("--model", cfg.model, "Ground-truth model; built-in one if omitted");
  simulate->add_option("--patients", cfg.patients, "Number of patients")->required();
  simulate->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", cfg.out, "Output directory")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--model", cfg.model, "Model file")->required();
  serve->add_option("--port", cfg.port, "Port, 0 for any free one")->capture_default_str();
  serve->add_option("--host", cfg.host, "Bind address")->capture_default_str();
  serve->add_option("--store", cfg.store, "Session database")->capture_default_str();
  serve->add_option("--threshold", cfg.threshold, "Alarm threshold reported to clients")->capture_default_str();
  serve->add_option("--static", cfg.static_dir, "Directory served under /");

  auto* exp = app.add_subcommand("export", "Write a built-in model or schema");
  exp->add_option("what", cfg.what, "structure | ground-truth | schema | chain")
      ->required()
      ->check(CLI::IsMember({"structure", "ground-truth", "schema", "chain"}));
  exp->add_option("--out", cfg.out, "Write here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (learn->parsed()) cmd_learn(cfg, out, err);
    else if (predict->parsed()) cmd_predict(cfg, out, err);
    else if (evaluate->parsed()) cmd_evaluate(cfg, out, err);
    else if (simulate->parsed()) cmd_simulate(cfg, out, err);
    else if (serve->parsed()) cmd_serve(cfg, out, err);
    else if (exp->parsed()) cmd_export(cfg, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out.flush();
  return 0;
}

}  // namespace nirisk::cli
