#include "nirisk/eval/evaluate.hpp"

#include "nirisk/dbn/inference.hpp"
#include "nirisk/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nirisk::eval {

Horizon parse_horizon(std::string_view text) {
  if (text == "per-stay") return Horizon::per_stay;
  if (text == "per-day") return Horizon::per_day;
  throw InputError("horizon must be per-stay or per-day, not '" + std::string(text) + "'");
}

const char* horizon_name(Horizon h) { return h == Horizon::per_stay ? "per-stay" : "per-day"; }

Evaluation evaluate_model(const dbn::DbnSpec& spec, const std::vector<clinical::PatientRecord>& test_records,
                          const clinical::ClinicalSchema& schema, double threshold, Horizon horizon) {
  std::vector<clinical::DiscreteRecord> discrete;
  discrete.reserve(test_records.size());
  for (const auto& r : test_records) discrete.push_back(clinical::discretize(r, schema));
  return evaluate_dataset(spec, clinical::to_dataset(discrete, schema), threshold, horizon);
}

Evaluation evaluate_dataset(const dbn::DbnSpec& spec, const clinical::ClinicalData& data, double threshold,
                            Horizon horizon) {
  classify(0.0, threshold);
  spec.require_valid();
  Evaluation out;
  out.horizon = horizon;
  for (std::size_t i = 0; i < data.timelines.size(); ++i) {
    const auto& id = data.patient_ids[i];
    if (horizon == Horizon::per_stay) {
      if (!data.stay_labels[i]) {
        ++out.unlabelled;
        continue;
      }
      const auto trace = dbn::predict_trajectory(spec, data.timelines[i]);
      double p = trace.entries.front().probability;
      if (trace.entries.size() > 1) {
        p = 0.0;
        for (std::size_t k = 1; k < trace.entries.size(); ++k) p = std::max(p, trace.entries[k].probability);
      }
      out.cases.push_back({id, 0, p, classify(p, threshold), *data.stay_labels[i]});
    } else {
      const auto& labels = data.day_labels[i];
      if (std::none_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); })) {
        out.unlabelled += labels.size();
        continue;
      }
      const auto trace = dbn::predict_trajectory(spec, data.timelines[i]);
      for (std::size_t d = 0; d < labels.size(); ++d) {
        if (!labels[d]) {
          ++out.unlabelled;
          continue;
        }
        const double p = trace.entries[d + 1].probability;
        out.cases.push_back({id, static_cast<int>(d + 1), p, classify(p, threshold), *labels[d]});
      }
    }
  }
  if (out.cases.empty()) throw InputError("test set has no labelled cases");
  std::vector<bool> predicted, actual;
  for (const auto& c : out.cases) {
    predicted.push_back(c.predicted);
    actual.push_back(c.actual);
  }
  out.report = metrics(confusion(predicted, actual), threshold);
  return out;
}

pgm::json evaluation_to_json(const Evaluation& e) {
  auto j = metrics_to_json(e.report);
  j["horizon"] = horizon_name(e.horizon);
  j["unlabelled"] = e.unlabelled;
  return j;
}

std::string histogram_csv(const std::vector<Case>& cases, double threshold) {
  constexpr int kBins = 10;
  struct Bin {
    int cases = 0, predicted_yes = 0, observed_yes = 0;
  };
  std::vector<Bin> bins(kBins);
  for (const auto& c : cases) {
    auto& b = bins[std::min(kBins - 1, static_cast<int>(c.probability * kBins))];
    ++b.cases;
    b.predicted_yes += classify(c.probability, threshold);
    b.observed_yes += c.actual;
  }
  std::ostringstream os;
  os << "lower,upper,cases,predicted_yes,observed_yes\n";
  for (int k = 0; k < kBins; ++k) {
    char range[32];
    std::snprintf(range, sizeof range, "%.1f,%.1f", k / double(kBins), (k + 1) / double(kBins));
    os << range << ',' << bins[k].cases << ',' << bins[k].predicted_yes << ',' << bins[k].observed_yes << '\n';
  }
  return os.str();
}

void write_histogram(const std::filesystem::path& path, const std::vector<Case>& cases, double threshold) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << histogram_csv(cases, threshold);
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace nirisk::eval
