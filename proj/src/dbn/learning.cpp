#include "nirisk/dbn/learning.hpp"

#include "nirisk/errors.hpp"

#include <memory>

namespace nirisk::dbn {

std::vector<pgm::Variable> slice_columns(const std::vector<pgm::Variable>& static_vars,
                                         const std::vector<pgm::Variable>& temporal_vars) {
  std::vector<pgm::Variable> cols = static_vars;
  cols.insert(cols.end(), temporal_vars.begin(), temporal_vars.end());
  for (const auto& v : temporal_vars) {
    pgm::Variable lag = v;
    lag.name = previous_token(v.name);
    cols.push_back(std::move(lag));
  }
  return cols;
}

DbnFit fit_dbn(const DbnSpec& structure, const SliceData& data, double alpha) {
  structure.require_valid();
  if (static_cast<Eigen::Index>(data.slice_day.size()) != data.slice_rows.rows())
    throw InputError("slice_day must have one entry per slice row");

  DbnFitReport report;
  auto statics = pgm::fit_parameters(structure.static_slice(), data.static_rows, alpha);
  report.static_report = std::move(statics.report);

  auto& sr = report.slice_report;
  sr.alpha = alpha;
  sr.data_rows = data.slice_rows.rows();

  for (const auto& tok_var : structure.temporal_variables()) {
    for (const auto& token : {tok_var.name, previous_token(tok_var.name)}) {
      auto c = data.slice_rows.column(token);
      if (!c) throw SchemaMismatch(token, "slice data has no column '" + token + "'");
      if (data.slice_rows.columns()[*c].states != tok_var.states)
        throw SchemaMismatch(token, "slice column '" + token + "' has different states than the structure");
    }
  }
  for (int s : structure.bridge_sources()) {
    const auto& var = structure.static_slice().variable(s);
    auto c = data.slice_rows.column(var.name);
    if (!c || data.slice_rows.columns()[*c].states != var.states)
      throw SchemaMismatch(var.name, "slice data lacks a matching static column '" + var.name + "'");
  }

  const auto n = static_cast<std::size_t>(data.slice_rows.rows());
  auto first_day = std::make_unique<bool[]>(n);
  auto later_day = std::make_unique<bool[]>(n);
  for (std::size_t r = 0; r < n; ++r) {
    first_day[r] = data.slice_day[r] == 1;
    later_day[r] = data.slice_day[r] >= 2;
  }
  auto as_span = [n](const std::unique_ptr<bool[]>& m) { return std::span<const bool>(m.get(), n); };

  auto fit_one = [&](const pgm::Cpt& src, std::span<const bool> include, const std::string& label) {
    auto fit = pgm::fit_cpt(data.slice_rows, src.child, src.parents, alpha, include);
    std::vector<const pgm::Variable*> pvars;
    for (const auto& p : src.parents) pvars.push_back(structure.lookup(p));
    for (auto row : fit.fallback_rows) sr.fallbacks.push_back({label, pgm::row_given(fit.cpt, row, pvars)});
    sr.counted.emplace_back(label, fit.counted);
    return std::move(fit.cpt);
  };

  SliceTemplate slice = structure.slice();
  for (int j = 0; j < static_cast<int>(structure.temporal_variables().size()); ++j) {
    const auto& src = structure.cpt(j);
    const bool lagged = structure.has_previous_parent(j);
    pgm::Cpt fitted = fit_one(src, lagged ? as_span(later_day) : std::span<const bool>{}, src.child);
    for (auto& c : slice.cpts)
      if (c.child == src.child) c = fitted;
    if (lagged) {
      const auto& init = structure.cpt(j, true);
      pgm::Cpt fitted_init = fit_one(init, as_span(first_day), init.child + " (day 1)");
      for (auto& c : slice.initial_cpts)
        if (c.child == init.child) c = fitted_init;
    }
  }

  DbnSpec spec = structure.with_tables(std::move(statics.network), std::move(slice));
  spec.require_valid();
  return DbnFit{std::move(spec), std::move(report)};
}

}  // namespace nirisk::dbn
