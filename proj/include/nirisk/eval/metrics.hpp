#pragma once

#include "nirisk/pgm/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nirisk::eval {

inline constexpr double kDefaultThreshold = 0.5;

// yes iff p >= threshold.  Throws RangeError unless both lie in [0, 1].
bool classify(double p, double threshold = kDefaultThreshold);

struct ConfusionMatrix {
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tp = 0;

  std::int64_t total() const { return tn + fp + fn + tp; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws InputError when the lengths differ or are zero.
ConfusionMatrix confusion(const std::vector<bool>& predicted, const std::vector<bool>& actual);

struct MetricsReport {
  ConfusionMatrix matrix;
  double accuracy = 0.0;
  // Absent when nothing was predicted positive (ppv) or negative (npv).
  std::optional<double> ppv;
  std::optional<double> npv;
  std::optional<double> threshold;
  std::int64_t total = 0;
};

// Throws InputError for an empty matrix or negative counts.
MetricsReport metrics(const ConfusionMatrix& m, std::optional<double> threshold = std::nullopt);

// "0.74"
std::string two_decimals(double v);

pgm::json matrix_to_json(const ConfusionMatrix& m);
ConfusionMatrix matrix_from_json(const pgm::json& j);
pgm::json metrics_to_json(const MetricsReport& r);
// Aligned plain-text rendering of the matrix and the metrics.
std::string metrics_table(const MetricsReport& r);

}  // namespace nirisk::eval
