#pragma once

#include "nirisk/dbn/spec.hpp"
#include "nirisk/pgm/learning.hpp"

#include <vector>

namespace nirisk::dbn {

// Training rows for a two-part DBN.
//
// `static_rows` holds one row per patient over the static variables.
// `slice_rows` holds one row per patient-day over the static variables, the
// template variables, and a lagged copy "X[t-1]" of every template variable
// (missing on day 1); `slice_day[r]` is that row's day number.
struct SliceData {
  pgm::Dataset static_rows;
  pgm::Dataset slice_rows;
  std::vector<int> slice_day;
};

// Column layout of SliceData::slice_rows.
std::vector<pgm::Variable> slice_columns(const std::vector<pgm::Variable>& static_vars,
                                         const std::vector<pgm::Variable>& temporal_vars);

struct DbnFitReport {
  pgm::FitReport static_report;
  // Template and initial CPTs; initial ones are reported as "X (day 1)".
  pgm::FitReport slice_report;
};

struct DbnFit {
  DbnSpec spec;
  DbnFitReport report;
};

// Smoothed maximum-likelihood fit of every table in `structure` (its own
// probabilities are ignored).  Template CPTs with a previous-day parent learn
// from days >= 2, their initial CPTs from day 1, all others from every day.
DbnFit fit_dbn(const DbnSpec& structure, const SliceData& data, double alpha);

}  // namespace nirisk::dbn
