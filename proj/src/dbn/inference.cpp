#include "nirisk/dbn/inference.hpp"

#include "nirisk/errors.hpp"
#include "nirisk/pgm/inference.hpp"

#include <algorithm>
#include <cmath>

namespace nirisk::dbn {

pgm::Network unroll(const DbnSpec& spec, int days) {
  spec.require_valid();
  if (days < 1) throw RangeError("unroll needs at least one day");
  const auto& st = spec.static_slice();
  std::vector<pgm::Variable> vars = st.variables();
  std::vector<pgm::Cpt> cpts = st.cpts();
  const auto& tvars = spec.temporal_variables();
  for (int t = 1; t <= days; ++t) {
    const bool initial = (t == 1);
    for (int j = 0; j < static_cast<int>(tvars.size()); ++j) {
      pgm::Variable v = tvars[j];
      v.name = slice_name(v.name, t);
      vars.push_back(std::move(v));
      pgm::Cpt c = spec.cpt(j, initial);
      c.child = slice_name(tvars[j].name, t);
      const auto& refs = spec.parents(j, initial);
      for (std::size_t k = 0; k < refs.size(); ++k) {
        switch (refs[k].kind) {
          case DbnSpec::ParentKind::same_day:
            c.parents[k] = slice_name(tvars[refs[k].index].name, t);
            break;
          case DbnSpec::ParentKind::previous_day:
            c.parents[k] = slice_name(tvars[refs[k].index].name, t - 1);
            break;
          case DbnSpec::ParentKind::static_slice:
            break;
        }
      }
      cpts.push_back(std::move(c));
    }
  }
  pgm::Network net(std::move(vars), std::move(cpts));
  if (!net.valid()) {
    std::string msg = "unrolled network is invalid:";
    for (const auto& s : net.violations()) msg += " " + s + ";";
    throw SpecError(msg);
  }
  return net;
}

pgm::Assignment unrolled_evidence(const EvidenceTimeline& timeline, int through) {
  pgm::Assignment ev = timeline.static_evidence;
  for (int t = 1; t <= through; ++t)
    for (const auto& [name, label] : timeline.days[t - 1]) ev.emplace(slice_name(name, t), label);
  return ev;
}

ForwardFilter::ForwardFilter(const DbnSpec& spec, const pgm::Assignment& static_evidence) : spec_(&spec) {
  spec.require_valid();
  const auto& st = spec.static_slice();
  const auto ev = st.encode(static_evidence);
  belief_ = pgm::joint_posterior(st, spec.bridge_sources(), ev);
  // Static indices -> leading block of the slice-network layout.
  for (std::size_t k = 0; k < belief_.vars.size(); ++k) belief_.vars[k] = static_cast<int>(k);
}

double ForwardFilter::step(const pgm::Assignment& day_evidence) {
  const bool initial = (day_ == 0);
  const auto& net = spec_->slice_network(initial);
  const int offset = spec_->template_offset(initial);
  const int nb = static_cast<int>(spec_->bridge_sources().size());
  const auto& iface = spec_->interface_variables();
  const int result = offset + spec_->result_index();

  std::vector<int> ev(net.size(), -1);
  for (const auto& [name, label] : day_evidence) {
    auto j = spec_->find_temporal(name);
    if (!j) throw SchemaMismatch(name, "unknown temporal variable '" + name + "'");
    if (*j == spec_->result_index()) throw InputError("the result node cannot be evidence");
    ev[offset + *j] = spec_->temporal_variables()[*j].state_index(label);
  }

  std::vector<int> keep;
  for (int s = 0; s < nb; ++s) keep.push_back(s);
  for (int k : iface) keep.push_back(offset + k);
  if (std::find(keep.begin(), keep.end(), result) == keep.end()) keep.push_back(result);
  std::sort(keep.begin(), keep.end());

  // Only ancestors (within the day) of kept or observed nodes matter.
  std::vector<bool> relevant(net.size(), false);
  std::vector<int> stack = keep;
  for (int i = offset; i < net.size(); ++i)
    if (ev[i] >= 0) stack.push_back(i);
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (relevant[u]) continue;
    relevant[u] = true;
    for (int p : net.parents(u)) stack.push_back(p);
  }

  std::vector<pgm::Factor> factors{belief_};
  for (int i = offset; i < net.size(); ++i) {
    if (!relevant[i]) continue;
    pgm::Factor f = pgm::cpt_factor(net, i);
    for (int var : std::vector<int>(f.vars)) {
      if (ev[var] < 0) continue;
      if (std::binary_search(keep.begin(), keep.end(), var))
        f = pgm::multiply(f, pgm::indicator(var, net.variable(var).cardinality(), ev[var]));
      else
        f = pgm::reduce(f, var, ev[var]);
    }
    if (f.is_zero()) throw ImpossibleEvidence("day " + std::to_string(day_ + 1) + " evidence has probability zero");
    factors.push_back(std::move(f));
  }
  pgm::Factor joint = pgm::eliminate(std::move(factors), keep);
  joint.values = pgm::normalized(joint);
  joint.log_scale = 0.0;

  pgm::Factor marginal = joint;
  for (int var : joint.vars)
    if (var != result) marginal = pgm::sum_out(marginal, var);
  const auto& rv = spec_->temporal_variables()[spec_->result_index()];
  last_.variable = rv.name;
  last_.states = rv.states;
  last_.probs = pgm::normalized(marginal).matrix();

  // Carry (bridge sources, interface) forward under the previous-day ids.
  const bool result_is_interface = std::binary_search(iface.begin(), iface.end(), spec_->result_index());
  pgm::Factor next = result_is_interface ? joint : pgm::sum_out(joint, result);
  for (auto& var : next.vars) {
    if (var >= offset) {
      const int k = static_cast<int>(std::lower_bound(iface.begin(), iface.end(), var - offset) - iface.begin());
      var = nb + k;
    }
  }
  next.values = pgm::normalized(next);
  next.log_scale = 0.0;
  belief_ = std::move(next);
  ++day_;
  return last_.probs[spec_->result_yes_state()];
}

namespace {

void check_day(const EvidenceTimeline& timeline, int t) {
  if (t < 1 || t > static_cast<int>(timeline.days.size()))
    throw RangeError("day " + std::to_string(t) + " is outside 1.." + std::to_string(timeline.days.size()));
}

}  // namespace

pgm::Distribution filter(const DbnSpec& spec, const EvidenceTimeline& timeline, int t) {
  spec.require_valid();
  check_day(timeline, t);
  validate_timeline(spec, timeline);
  ForwardFilter f(spec, timeline.static_evidence);
  for (int d = 1; d <= t; ++d) f.step(timeline.days[d - 1]);
  return f.last();
}

pgm::Distribution filter_unrolled(const DbnSpec& spec, const EvidenceTimeline& timeline, int t) {
  spec.require_valid();
  check_day(timeline, t);
  validate_timeline(spec, timeline);
  const auto net = unroll(spec, t);
  auto d = pgm::posterior(net, slice_name(spec.result_node(), t), unrolled_evidence(timeline, t));
  d.variable = spec.result_node();
  return d;
}

double baseline(const DbnSpec& spec, const pgm::Assignment& static_evidence) {
  spec.require_valid();
  if (const auto& node = spec.static_result_node()) {
    return pgm::posterior(spec.static_slice(), *node, static_evidence)["yes"];
  }
  ForwardFilter f(spec, static_evidence);
  return f.step({});
}

PredictionTrace predict_trajectory(const DbnSpec& spec, const EvidenceTimeline& timeline) {
  spec.require_valid();
  validate_timeline(spec, timeline);
  PredictionTrace trace;
  trace.entries.push_back({0, baseline(spec, timeline.static_evidence)});
  ForwardFilter f(spec, timeline.static_evidence);
  for (std::size_t d = 0; d < timeline.days.size(); ++d) {
    trace.entries.push_back({static_cast<int>(d + 1), f.step(timeline.days[d])});
  }
  return trace;
}

ConsistencyReport forward_equals_unrolled(const DbnSpec& spec, const EvidenceTimeline& timeline) {
  ConsistencyReport report;
  spec.require_valid();
  validate_timeline(spec, timeline);
  ForwardFilter f(spec, timeline.static_evidence);
  for (int t = 1; t <= static_cast<int>(timeline.days.size()); ++t) {
    const double fwd = f.step(timeline.days[t - 1]);
    const double unr = filter_unrolled(spec, timeline, t)["yes"];
    report.forward.push_back(fwd);
    report.unrolled.push_back(unr);
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(fwd - unr));
  }
  return report;
}

}  // namespace nirisk::dbn
