#pragma once

#include "nirisk/pgm/network.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nirisk::pgm {

// Rows of categorical observations over named columns.  Cells are stored as
// state indices; -1 marks a missing cell.
class Dataset {
 public:
  using Codes = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Dataset() = default;
  explicit Dataset(std::vector<Variable> columns);

  const std::vector<Variable>& columns() const { return columns_; }
  int column_count() const { return static_cast<int>(columns_.size()); }
  Eigen::Index rows() const { return rows_; }
  std::optional<int> column(std::string_view name) const;

  // Unbound columns become missing cells.  Throws SchemaMismatch for unknown
  // columns or labels outside the column's states.
  void add_row(const Assignment& row);
  void add_codes(std::span<const int> codes);

  int code(Eigen::Index row, int col) const { return cells_[static_cast<std::size_t>(row * column_count() + col)]; }
  Eigen::Map<const Codes> codes() const;
  Assignment row(Eigen::Index r) const;
  bool complete() const;

 private:
  std::vector<Variable> columns_;
  std::vector<int> cells_;
  Eigen::Index rows_ = 0;
};

struct CptFit {
  Cpt cpt;
  // Rows with no supporting data and alpha = 0, filled uniformly.
  std::vector<Eigen::Index> fallback_rows;
  // Data rows in which the child and every parent were bound.
  Eigen::Index counted = 0;
};

// Smoothed maximum-likelihood estimate of one CPT from dataset columns:
//   (count(child=s, parents=u) + alpha) / (count(parents=u) + alpha * |states|)
// Rows with a zero denominator come out uniform and are listed as
// fallbacks.  Rows where `include` is false, or where the child or a parent is
// missing, are skipped.  An empty `include` means every row.
CptFit fit_cpt(const Dataset& data, std::string_view child, const std::vector<std::string>& parents, double alpha,
               std::span<const bool> include = {});

struct FitReport {
  struct Fallback {
    std::string child;
    Assignment given;
  };
  Eigen::Index data_rows = 0;
  double alpha = 0.0;
  std::vector<Fallback> fallbacks;
  std::vector<std::pair<std::string, Eigen::Index>> counted;
};

struct FitResult {
  Network network;
  FitReport report;
};

// Refit every CPT of `structure` (its probabilities are ignored).  Each
// structure variable needs a dataset column of the same name with identical
// states, otherwise SchemaMismatch.  Throws InputError for alpha < 0.
FitResult fit_parameters(const Network& structure, const Dataset& data, double alpha);

// Translate fallback row numbers of a fitted CPT into parent bindings.
Assignment row_given(const Cpt& cpt, Eigen::Index row, const std::vector<const Variable*>& parents);

}  // namespace nirisk::pgm
