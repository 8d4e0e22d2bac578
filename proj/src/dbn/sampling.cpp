#include "nirisk/dbn/sampling.hpp"

#include "nirisk/errors.hpp"
#include "nirisk/pgm/sampling.hpp"

namespace nirisk::dbn {

std::vector<std::vector<int>> sample_days(const DbnSpec& spec, std::span<const int> static_states, int days,
                                          std::mt19937_64& rng) {
  spec.require_valid();
  if (days < 0) throw RangeError("days must be non-negative");
  if (static_cast<int>(static_states.size()) != spec.static_slice().size())
    throw InputError("static state vector has the wrong length");
  const auto& vars = spec.temporal_variables();
  const int n = static_cast<int>(vars.size());
  std::vector<std::vector<int>> out;
  std::vector<int> prev;
  for (int d = 1; d <= days; ++d) {
    const bool initial = d == 1;
    const int offset = spec.template_offset(initial);
    std::vector<int> cur(n, -1);
    for (int node : spec.slice_network(initial).topological_order()) {
      if (node < offset) continue;
      const int j = node - offset;
      Eigen::Index r = 0;
      for (const auto& p : spec.parents(j, initial)) {
        int state = 0, card = 0;
        switch (p.kind) {
          case DbnSpec::ParentKind::same_day:
            state = cur[p.index], card = vars[p.index].cardinality();
            break;
          case DbnSpec::ParentKind::previous_day:
            state = prev[p.index], card = vars[p.index].cardinality();
            break;
          case DbnSpec::ParentKind::static_slice:
            state = static_states[p.index], card = spec.static_slice().variable(p.index).cardinality();
            break;
        }
        r = r * card + state;
      }
      cur[j] = pgm::draw_categorical(spec.cpt(j, initial).table.row(r), rng);
    }
    prev = cur;
    out.push_back(std::move(cur));
  }
  return out;
}

Trajectory sample_trajectory(const DbnSpec& spec, int days, std::mt19937_64& rng) {
  spec.require_valid();
  const auto statics = pgm::sample_states(spec.static_slice(), rng);
  Trajectory t;
  t.statics = spec.static_slice().decode(statics);
  const auto& vars = spec.temporal_variables();
  for (const auto& day : sample_days(spec, statics, days, rng)) {
    pgm::Assignment a;
    for (std::size_t j = 0; j < vars.size(); ++j) a.emplace(vars[j].name, vars[j].states[day[j]]);
    t.days.push_back(std::move(a));
  }
  return t;
}

SliceData slice_data(const DbnSpec& spec, const std::vector<Trajectory>& trajectories) {
  SliceData data{pgm::Dataset(spec.static_slice().variables()),
                 pgm::Dataset(slice_columns(spec.static_slice().variables(), spec.temporal_variables())),
                 {}};
  for (const auto& t : trajectories) {
    data.static_rows.add_row(t.statics);
    for (std::size_t d = 0; d < t.days.size(); ++d) {
      pgm::Assignment row = t.statics;
      row.insert(t.days[d].begin(), t.days[d].end());
      if (d > 0)
        for (const auto& [name, label] : t.days[d - 1]) row.emplace(previous_token(name), label);
      data.slice_rows.add_row(row);
      data.slice_day.push_back(static_cast<int>(d) + 1);
    }
  }
  return data;
}

}  // namespace nirisk::dbn
