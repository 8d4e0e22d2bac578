#include "nirisk/eval/metrics.hpp"

#include "nirisk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace nirisk::eval {

namespace {

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << what << " " << v << " is outside [0, 1]";
    throw RangeError(os.str());
  }
}

std::string fixed6(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

bool classify(double p, double threshold) {
  check_probability(p, "probability");
  check_probability(threshold, "threshold");
  return p >= threshold;
}

ConfusionMatrix confusion(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size())
    throw InputError("predicted and actual lists differ in length (" + std::to_string(predicted.size()) + " vs " +
                     std::to_string(actual.size()) + ")");
  if (predicted.empty()) throw InputError("no cases to compare");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i])
      ++(actual[i] ? m.tp : m.fp);
    else
      ++(actual[i] ? m.fn : m.tn);
  }
  return m;
}

MetricsReport metrics(const ConfusionMatrix& m, std::optional<double> threshold) {
  if (m.tn < 0 || m.fp < 0 || m.fn < 0 || m.tp < 0) throw InputError("confusion counts must be non-negative");
  if (m.total() < 1) throw InputError("confusion matrix is empty");
  if (threshold) check_probability(*threshold, "threshold");
  MetricsReport r;
  r.matrix = m;
  r.total = m.total();
  r.threshold = threshold;
  r.accuracy = static_cast<double>(m.tn + m.tp) / static_cast<double>(r.total);
  if (m.tp + m.fp > 0) r.ppv = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tn + m.fn > 0) r.npv = static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fn);
  return r;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

pgm::json matrix_to_json(const ConfusionMatrix& m) {
  return {{"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}, {"tp", m.tp}};
}

ConfusionMatrix matrix_from_json(const pgm::json& j) {
  if (!j.is_object()) throw FormatError("confusion matrix must be an object");
  ConfusionMatrix m;
  for (auto [key, cell] : {std::pair{"tn", &m.tn}, {"fp", &m.fp}, {"fn", &m.fn}, {"tp", &m.tp}}) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw FormatError(std::string("confusion matrix needs an integer \"") + key + "\"");
    *cell = j.at(key).get<std::int64_t>();
  }
  return m;
}

pgm::json metrics_to_json(const MetricsReport& r) {
  auto opt = [](std::optional<double> v) { return v ? pgm::json(*v) : pgm::json(nullptr); };
  auto opt2 = [](std::optional<double> v) { return v ? pgm::json(two_decimals(*v)) : pgm::json(nullptr); };
  return {{"matrix", matrix_to_json(r.matrix)},
          {"total", r.total},
          {"threshold", opt(r.threshold)},
          {"accuracy", r.accuracy},
          {"ppv", opt(r.ppv)},
          {"npv", opt(r.npv)},
          {"rounded", {{"accuracy", two_decimals(r.accuracy)}, {"ppv", opt2(r.ppv)}, {"npv", opt2(r.npv)}}}};
}

std::string metrics_table(const MetricsReport& r) {
  const auto& m = r.matrix;
  std::ostringstream os;
  const int w = static_cast<int>(std::max<std::size_t>(5, std::to_string(r.total).size()));
  os << std::setw(14) << "" << std::setw(w + 11) << "predicted no" << std::setw(w + 12) << "predicted yes" << '\n';
  os << std::setw(14) << std::left << "actual no" << std::right << std::setw(w + 11) << m.tn << std::setw(w + 12)
     << m.fp << '\n';
  os << std::setw(14) << std::left << "actual yes" << std::right << std::setw(w + 11) << m.fn << std::setw(w + 12)
     << m.tp << '\n';
  os << '\n';
  auto line = [&](const char* name, std::optional<double> v) {
    os << std::setw(10) << std::left << name << std::right << std::setw(10) << fixed6(v) << std::setw(6)
       << (v ? two_decimals(*v) : "n/a") << '\n';
  };
  line("accuracy", r.accuracy);
  line("ppv", r.ppv);
  line("npv", r.npv);
  os << std::setw(10) << std::left << "cases" << std::right << std::setw(10) << r.total << '\n';
  if (r.threshold) os << std::setw(10) << std::left << "threshold" << std::right << std::setw(10) << fixed6(r.threshold) << '\n';
  return os.str();
}

}  // namespace nirisk::eval
