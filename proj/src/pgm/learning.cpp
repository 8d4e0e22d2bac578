#include "nirisk/pgm/learning.hpp"

#include "nirisk/errors.hpp"

#include <algorithm>

namespace nirisk::pgm {

Dataset::Dataset(std::vector<Variable> columns) : columns_(std::move(columns)) {}

std::optional<int> Dataset::column(std::string_view name) const {
  for (int c = 0; c < column_count(); ++c)
    if (columns_[c].name == name) return c;
  return std::nullopt;
}

void Dataset::add_row(const Assignment& row) {
  std::vector<int> codes(columns_.size(), -1);
  for (const auto& [name, label] : row) {
    auto c = column(name);
    if (!c) throw SchemaMismatch(name, "dataset has no column '" + name + "'");
    codes[*c] = columns_[*c].state_index(label);
  }
  add_codes(codes);
}

void Dataset::add_codes(std::span<const int> codes) {
  if (static_cast<int>(codes.size()) != column_count()) throw InputError("row width does not match the dataset");
  for (int c = 0; c < column_count(); ++c) {
    if (codes[c] < -1 || codes[c] >= columns_[c].cardinality())
      throw SchemaMismatch(columns_[c].name, "state code out of range for '" + columns_[c].name + "'");
  }
  cells_.insert(cells_.end(), codes.begin(), codes.end());
  ++rows_;
}

Eigen::Map<const Dataset::Codes> Dataset::codes() const {
  return Eigen::Map<const Codes>(cells_.data(), rows_, column_count());
}

Assignment Dataset::row(Eigen::Index r) const {
  Assignment a;
  for (int c = 0; c < column_count(); ++c) {
    const int s = code(r, c);
    if (s >= 0) a.emplace(columns_[c].name, columns_[c].states[s]);
  }
  return a;
}

bool Dataset::complete() const {
  return std::none_of(cells_.begin(), cells_.end(), [](int s) { return s < 0; });
}

CptFit fit_cpt(const Dataset& data, std::string_view child, const std::vector<std::string>& parents, double alpha,
               std::span<const bool> include) {
  if (alpha < 0.0) throw InputError("smoothing pseudo-count must be >= 0");
  auto need = [&](std::string_view name) {
    auto c = data.column(name);
    if (!c) throw SchemaMismatch(std::string(name), "dataset has no column '" + std::string(name) + "'");
    return *c;
  };
  const int child_col = need(child);
  std::vector<int> parent_cols;
  std::vector<int> cards;
  for (const auto& p : parents) {
    parent_cols.push_back(need(p));
    cards.push_back(data.columns()[parent_cols.back()].cardinality());
  }
  const int k = data.columns()[child_col].cardinality();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(row_count(cards), k);

  CptFit fit;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    if (!include.empty() && !include[static_cast<std::size_t>(r)]) continue;
    const int s = data.code(r, child_col);
    if (s < 0) continue;
    Eigen::Index row = 0;
    bool bound = true;
    for (std::size_t j = 0; j < parent_cols.size(); ++j) {
      const int ps = data.code(r, parent_cols[j]);
      if (ps < 0) {
        bound = false;
        break;
      }
      row = row * cards[j] + ps;
    }
    if (!bound) continue;
    counts(row, s) += 1.0;
    ++fit.counted;
  }

  fit.cpt.child = std::string(child);
  fit.cpt.parents = parents;
  fit.cpt.table.resize(counts.rows(), k);
  for (Eigen::Index row = 0; row < counts.rows(); ++row) {
    const double denom = counts.row(row).sum() + alpha * k;
    if (denom > 0.0) {
      fit.cpt.table.row(row) = (counts.row(row).array() + alpha) / denom;
    } else {
      fit.cpt.table.row(row).setConstant(1.0 / k);
      fit.fallback_rows.push_back(row);
    }
  }
  return fit;
}

Assignment row_given(const Cpt& cpt, Eigen::Index row, const std::vector<const Variable*>& parents) {
  std::vector<int> cards;
  for (const auto* p : parents) cards.push_back(p->cardinality());
  const auto config = row_configuration(row, cards);
  Assignment given;
  for (std::size_t j = 0; j < parents.size(); ++j) given.emplace(cpt.parents[j], parents[j]->states[config[j]]);
  return given;
}

FitResult fit_parameters(const Network& structure, const Dataset& data, double alpha) {
  if (alpha < 0.0) throw InputError("smoothing pseudo-count must be >= 0");
  FitResult result;
  result.report.data_rows = data.rows();
  result.report.alpha = alpha;

  for (const auto& var : structure.variables()) {
    auto c = data.column(var.name);
    if (!c) throw SchemaMismatch(var.name, "dataset has no column '" + var.name + "'");
    if (data.columns()[*c].states != var.states)
      throw SchemaMismatch(var.name, "dataset column '" + var.name + "' has different states than the structure");
  }

  std::vector<Cpt> cpts;
  for (int i = 0; i < structure.size(); ++i) {
    const auto& src = structure.cpt(i);
    auto fit = fit_cpt(data, src.child, src.parents, alpha);
    std::vector<const Variable*> pvars;
    for (int p : structure.parents(i)) pvars.push_back(&structure.variable(p));
    for (auto row : fit.fallback_rows)
      result.report.fallbacks.push_back({src.child, row_given(fit.cpt, row, pvars)});
    result.report.counted.emplace_back(src.child, fit.counted);
    cpts.push_back(std::move(fit.cpt));
  }
  result.network = Network(structure.variables(), std::move(cpts));
  return result;
}

}  // namespace nirisk::pgm
