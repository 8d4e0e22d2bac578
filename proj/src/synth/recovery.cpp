#include "nirisk/synth/recovery.hpp"

#include "nirisk/errors.hpp"

namespace nirisk::synth {

namespace {

void compare_table(const dbn::DbnSpec& spec, const pgm::Cpt& a, const pgm::Cpt& b, const std::string& label,
                   RecoveryReport& out) {
  if (a.child != b.child || a.parents != b.parents || a.table.rows() != b.table.rows() ||
      a.table.cols() != b.table.cols())
    throw ComparisonError("table '" + label + "' differs in structure");
  std::vector<int> cards;
  for (const auto& p : a.parents) cards.push_back(spec.lookup(p)->cardinality());
  for (Eigen::Index r = 0; r < a.table.rows(); ++r) {
    const auto config = pgm::row_configuration(r, cards);
    std::string given;
    for (std::size_t k = 0; k < a.parents.size(); ++k) {
      if (k) given += ",";
      given += a.parents[k] + "=" + spec.lookup(a.parents[k])->states[config[k]];
    }
    out.rows.push_back({label, given, (a.table.row(r) - b.table.row(r)).cwiseAbs().sum()});
  }
}

}  // namespace

RecoveryReport recovery_report(const dbn::DbnSpec& ground_truth, const dbn::DbnSpec& learned) {
  const auto& sa = ground_truth.static_slice();
  const auto& sb = learned.static_slice();
  if (sa.variables() != sb.variables()) throw ComparisonError("static variables differ");
  if (ground_truth.temporal_variables() != learned.temporal_variables())
    throw ComparisonError("template variables differ");
  if (ground_truth.slice().initial_cpts.size() != learned.slice().initial_cpts.size())
    throw ComparisonError("initial tables differ");

  RecoveryReport out;
  for (int i = 0; i < sa.size(); ++i) compare_table(ground_truth, sa.cpt(i), sb.cpt(i), sa.variable(i).name, out);
  const int n = static_cast<int>(ground_truth.temporal_variables().size());
  for (int j = 0; j < n; ++j) {
    const auto& name = ground_truth.temporal_variables()[j].name;
    compare_table(ground_truth, ground_truth.cpt(j), learned.cpt(j), name, out);
    if (ground_truth.has_previous_parent(j) != learned.has_previous_parent(j))
      throw ComparisonError("table '" + name + "' differs in structure");
    if (ground_truth.has_previous_parent(j))
      compare_table(ground_truth, ground_truth.cpt(j, true), learned.cpt(j, true), name + " (day 1)", out);
  }
  double sum = 0.0;
  for (const auto& r : out.rows) {
    out.max_l1 = std::max(out.max_l1, r.l1);
    sum += r.l1;
  }
  if (!out.rows.empty()) out.mean_l1 = sum / static_cast<double>(out.rows.size());
  return out;
}

pgm::json recovery_to_json(const RecoveryReport& report) {
  pgm::json rows = pgm::json::array();
  for (const auto& r : report.rows) rows.push_back({{"table", r.table}, {"given", r.given}, {"l1", r.l1}});
  return {{"max_l1", report.max_l1}, {"mean_l1", report.mean_l1}, {"rows", rows}};
}

}  // namespace nirisk::synth
