#include "nirisk/synth/cohort.hpp"

#include "nirisk/clinical/model.hpp"
#include "nirisk/dbn/io.hpp"
#include "nirisk/dbn/sampling.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/pgm/sampling.hpp"

#include <array>
#include <cmath>
#include <map>

namespace nirisk::synth {

namespace {

using clinical::Derivation;

std::mt19937_64 patient_engine(std::uint64_t seed, int i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i)};
  return std::mt19937_64(seq);
}

void check(const CohortConfig& cfg) {
  if (cfg.n_patients < 1) throw InputError("n_patients must be at least 1");
  cfg.ground_truth.require_valid();
  if (cfg.stay_weights.empty()) throw InputError("stay weights are empty");
  double total = 0;
  for (double w : cfg.stay_weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw InputError("stay weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0) throw InputError("stay weights must have positive total");
  if (cfg.ground_truth.static_slice().variables() != cfg.schema.fixed_variables())
    throw SchemaMismatch("", "ground truth static slice does not match the schema's fixed variables");
  if (cfg.ground_truth.temporal_variables() != cfg.schema.temporal)
    throw SchemaMismatch("", "ground truth template does not match the schema's temporal variables");
}

struct Draw {
  SampledPatient patient;
  std::vector<int> statics;
  int stay = 0;
};

Draw draw_patient(const CohortConfig& cfg, std::mt19937_64& rng) {
  const auto& spec = cfg.ground_truth;
  const auto& snet = spec.static_slice();
  Draw out;
  out.statics = pgm::sample_states(snet, rng);

  Eigen::RowVectorXd w = Eigen::Map<const Eigen::RowVectorXd>(cfg.stay_weights.data(),
                                                              static_cast<Eigen::Index>(cfg.stay_weights.size()));
  for (const auto& f : cfg.schema.fixed) {
    if (f.derive.kind != Derivation::Kind::stay_length) continue;
    const int b = out.statics[snet.index(f.variable.name)];
    for (Eigen::Index k = 0; k < w.size(); ++k)
      if (clinical::bin_index(f.derive.edges, static_cast<double>(k)) != b) w(k) = 0.0;
    if (w.sum() <= 0)
      throw InputError("no stay length in the weights falls in bin '" + f.variable.states[b] + "' of '" +
                       f.variable.name + "'");
  }
  out.stay = pgm::draw_categorical(w / w.sum(), rng) + 1;

  out.patient.fixed = snet.decode(out.statics);
  const auto& vars = spec.temporal_variables();
  for (const auto& day : dbn::sample_days(spec, out.statics, out.stay, rng)) {
    pgm::Assignment a;
    for (std::size_t j = 0; j < vars.size(); ++j) a.emplace(vars[j].name, vars[j].states[day[j]]);
    out.patient.days.push_back(std::move(a));
  }
  return out;
}

unsigned season_month(const std::string& season, std::mt19937_64& rng) {
  static const std::map<std::string, std::array<unsigned, 3>> months = {
      {"winter", {12, 1, 2}}, {"spring", {3, 4, 5}}, {"summer", {6, 7, 8}}, {"autumn", {9, 10, 11}}};
  auto it = months.find(season);
  if (it == months.end()) throw SchemaMismatch("", "unknown season '" + season + "'");
  return it->second[static_cast<std::size_t>(pgm::uniform01(rng) * 3)];
}

std::string number_in_bin(const std::vector<double>& edges, int b, std::mt19937_64& rng) {
  const double lo = edges[b];
  const double hi = b + 1 < static_cast<int>(edges.size()) ? edges[b + 1] : lo + 25;
  const double span = std::floor(hi - lo);
  const double v = lo + std::floor(pgm::uniform01(rng) * span);
  if (v == std::floor(v)) return std::to_string(static_cast<long long>(v));
  return std::to_string(v);
}

}  // namespace

CohortConfig default_config(int n_patients, std::uint64_t seed, int stay_min, int stay_max) {
  CohortConfig cfg;
  cfg.schema = clinical::default_schema();
  cfg.stay_weights = clinical::uniform_stay_weights(stay_min, stay_max);
  cfg.ground_truth = clinical::ground_truth_spec(cfg.schema, cfg.stay_weights);
  cfg.n_patients = n_patients;
  cfg.seed = seed;
  return cfg;
}

std::vector<SampledPatient> sample_cohort(const CohortConfig& cfg) {
  check(cfg);
  std::vector<SampledPatient> out;
  out.reserve(static_cast<std::size_t>(cfg.n_patients));
  for (int i = 0; i < cfg.n_patients; ++i) {
    auto rng = patient_engine(cfg.seed, i);
    out.push_back(draw_patient(cfg, rng).patient);
  }
  return out;
}

std::vector<clinical::PatientRecord> generate_cohort(const CohortConfig& cfg) {
  check(cfg);
  const int width = static_cast<int>(std::to_string(cfg.n_patients).size());
  std::vector<clinical::PatientRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.n_patients));
  for (int i = 0; i < cfg.n_patients; ++i) {
    auto rng = patient_engine(cfg.seed, i);
    Draw d = draw_patient(cfg, rng);

    clinical::PatientRecord rec;
    std::string num = std::to_string(i + 1);
    rec.patient_id = "P" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(num.size()))), '0') + num;

    std::optional<unsigned> month;
    for (const auto& f : cfg.schema.fixed) {
      const std::string& label = d.patient.fixed.at(f.variable.name);
      switch (f.derive.kind) {
        case Derivation::Kind::categorical:
          rec.fixed[f.derive.source] = label;
          break;
        case Derivation::Kind::bins:
          rec.fixed[f.derive.source] = number_in_bin(f.derive.edges, f.variable.state_index(label), rng);
          break;
        case Derivation::Kind::season:
          if (f.derive.source != "entry_date")
            throw SchemaMismatch(f.variable.name, "simulation derives seasons from entry_date only");
          month = season_month(label, rng);
          break;
        case Derivation::Kind::stay_length:
          break;
      }
    }
    if (!month) month = 1 + static_cast<unsigned>(pgm::uniform01(rng) * 12);
    const int year = cfg.first_year + static_cast<int>(pgm::uniform01(rng) * 3);
    const unsigned day = 1 + static_cast<unsigned>(pgm::uniform01(rng) * 28);
    rec.entry = clinical::Date{std::chrono::year{year}, std::chrono::month{*month}, std::chrono::day{day}};
    rec.exit = clinical::Date{std::chrono::sys_days{rec.entry} + std::chrono::days{d.stay - 1}};
    rec.fixed["entry_date"] = clinical::format_date(rec.entry);
    rec.fixed["exit_date"] = clinical::format_date(rec.exit);
    for (const auto& day_ev : d.patient.days) rec.days.emplace_back(day_ev.begin(), day_ev.end());
    out.push_back(std::move(rec));
  }
  return out;
}

CohortFiles write_cohort(const std::filesystem::path& dir, const CohortConfig& cfg,
                         const std::vector<clinical::PatientRecord>& records) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  CohortFiles files{dir / "fixed.csv", dir / "daily.csv", dir / "manifest.json"};
  clinical::write_fixed_file(files.fixed, records);
  clinical::write_daily_file(files.daily, records, cfg.schema);
  pgm::json manifest = {
      {"n_patients", cfg.n_patients},
      {"seed", cfg.seed},
      {"first_year", cfg.first_year},
      {"stay_weights", cfg.stay_weights},
      {"fixed_file", files.fixed.filename().string()},
      {"daily_file", files.daily.filename().string()},
      {"schema", clinical::schema_to_json(cfg.schema)},
      {"ground_truth", dbn::spec_to_json(cfg.ground_truth)},
  };
  pgm::write_json_file(files.manifest, manifest);
  return files;
}

}  // namespace nirisk::synth
