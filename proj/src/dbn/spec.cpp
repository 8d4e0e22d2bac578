#include "nirisk/dbn/spec.hpp"

#include "nirisk/errors.hpp"

#include <algorithm>
#include <set>

namespace nirisk::dbn {

namespace {

constexpr std::string_view kPreviousSuffix = "[t-1]";

std::optional<std::string> strip_previous(const std::string& token) {
  if (token.size() > kPreviousSuffix.size() && token.ends_with(kPreviousSuffix))
    return token.substr(0, token.size() - kPreviousSuffix.size());
  return std::nullopt;
}

std::vector<Arc> sorted(std::vector<Arc> arcs) {
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

pgm::Cpt uniform_cpt(const pgm::Variable& v) {
  return pgm::Cpt{v.name, {}, Eigen::MatrixXd::Constant(1, v.cardinality(), 1.0 / std::max(1, v.cardinality()))};
}

}  // namespace

std::string previous_token(const std::string& var) { return var + std::string(kPreviousSuffix); }

std::string slice_name(const std::string& var, int day) { return var + "[" + std::to_string(day) + "]"; }

DbnSpec::DbnSpec(pgm::Network static_slice, SliceTemplate slice, std::vector<Arc> inter_slice_arcs,
                 std::vector<Arc> bridge_arcs, std::string result_node, std::optional<std::string> static_result_node)
    : static_(std::move(static_slice)),
      slice_(std::move(slice)),
      inter_(std::move(inter_slice_arcs)),
      bridge_(std::move(bridge_arcs)),
      result_(std::move(result_node)),
      static_result_(std::move(static_result_node)) {
  resolve_and_validate();
}

std::optional<int> DbnSpec::find_temporal(std::string_view name) const {
  for (int j = 0; j < static_cast<int>(slice_.variables.size()); ++j)
    if (slice_.variables[j].name == name) return j;
  return std::nullopt;
}

const pgm::Variable* DbnSpec::lookup(const std::string& token) const {
  if (auto j = find_temporal(token)) return &slice_.variables[*j];
  if (auto i = static_.find(token)) return &static_.variable(*i);
  if (auto base = strip_previous(token))
    if (auto j = find_temporal(*base)) return &slice_.variables[*j];
  return nullptr;
}

void DbnSpec::resolve_and_validate() {
  auto& v = violations_;
  v.clear();
  for (const auto& msg : static_.violations()) v.push_back("static slice: " + msg);

  const int n = static_cast<int>(slice_.variables.size());
  std::set<std::string> names;
  for (const auto& var : slice_.variables) {
    if (var.name.empty()) v.push_back("template variable with an empty name");
    if (var.name.find_first_of("[]") != std::string::npos)
      v.push_back("template variable '" + var.name + "' contains '[' or ']'");
    if (!names.insert(var.name).second) v.push_back("duplicate template variable '" + var.name + "'");
    if (static_.find(var.name)) v.push_back("'" + var.name + "' is both a static and a template variable");
  }

  cpt_of_.assign(n, -1);
  initial_of_.assign(n, -1);
  for (int c = 0; c < static_cast<int>(slice_.cpts.size()); ++c) {
    auto j = find_temporal(slice_.cpts[c].child);
    if (!j) {
      v.push_back("template cpt for unknown variable '" + slice_.cpts[c].child + "'");
    } else if (cpt_of_[*j] >= 0) {
      v.push_back("more than one template cpt for '" + slice_.cpts[c].child + "'");
    } else {
      cpt_of_[*j] = c;
    }
  }
  for (int c = 0; c < static_cast<int>(slice_.initial_cpts.size()); ++c) {
    auto j = find_temporal(slice_.initial_cpts[c].child);
    if (!j) {
      v.push_back("initial cpt for unknown variable '" + slice_.initial_cpts[c].child + "'");
    } else if (initial_of_[*j] >= 0) {
      v.push_back("more than one initial cpt for '" + slice_.initial_cpts[c].child + "'");
    } else {
      initial_of_[*j] = c;
    }
  }

  parents_.assign(n, {});
  initial_parents_.assign(n, {});
  std::vector<Arc> inter, bridge;
  std::set<int> iface, sources;
  auto resolve = [&](const pgm::Cpt& cpt, std::vector<ParentRef>& out, bool record) {
    for (const auto& token : cpt.parents) {
      if (auto j = find_temporal(token)) {
        out.push_back({ParentKind::same_day, *j});
      } else if (auto s = static_.find(token)) {
        out.push_back({ParentKind::static_slice, *s});
        if (record) {
          bridge.emplace_back(token, cpt.child);
          sources.insert(*s);
        }
      } else if (auto base = strip_previous(token); base && find_temporal(*base)) {
        const int k = *find_temporal(*base);
        out.push_back({ParentKind::previous_day, k});
        if (record) {
          inter.emplace_back(*base, cpt.child);
          iface.insert(k);
        }
      } else {
        v.push_back("cpt of '" + cpt.child + "' names unknown parent '" + token + "'");
      }
    }
  };
  for (int j = 0; j < n; ++j) {
    if (cpt_of_[j] < 0) {
      v.push_back("no template cpt for '" + slice_.variables[j].name + "'");
      continue;
    }
    resolve(slice_.cpts[cpt_of_[j]], parents_[j], true);
  }
  for (int j = 0; j < n; ++j) {
    if (initial_of_[j] < 0) {
      if (has_previous_parent(j)) v.push_back("no initial cpt for '" + slice_.variables[j].name + "'");
      continue;
    }
    if (!has_previous_parent(j)) {
      v.push_back("initial cpt for '" + slice_.variables[j].name + "' which has no previous-day parent");
      continue;
    }
    const auto& init = slice_.initial_cpts[initial_of_[j]];
    std::vector<std::string> expected;
    for (const auto& token : slice_.cpts[cpt_of_[j]].parents)
      if (!strip_previous(token) || find_temporal(token)) expected.push_back(token);
    if (init.parents != expected)
      v.push_back("initial cpt of '" + init.child + "' must have the template parents minus previous-day ones");
    resolve(init, initial_parents_[j], false);
  }

  // Declared arc lists must match what the CPTs say.
  if (inter_.empty()) inter_ = inter;
  if (bridge_.empty()) bridge_ = bridge;
  for (const auto& [from, to] : inter_) {
    if (!find_temporal(from) || !find_temporal(to))
      v.push_back("inter-slice arc " + from + "->" + to + " must join template variables");
  }
  if (sorted(inter_) != sorted(inter)) v.push_back("inter_slice_arcs disagree with the template cpt parents");
  if (sorted(bridge_) != sorted(bridge)) v.push_back("bridge_arcs disagree with the template cpt parents");
  interface_.assign(iface.begin(), iface.end());
  bridge_sources_.assign(sources.begin(), sources.end());

  result_index_ = -1;
  result_yes_ = -1;
  if (auto r = find_temporal(result_)) {
    const auto& states = slice_.variables[*r].states;
    auto sorted_states = states;
    std::sort(sorted_states.begin(), sorted_states.end());
    if (sorted_states != std::vector<std::string>{"no", "yes"}) {
      v.push_back("result node '" + result_ + "' must have states {yes, no}");
    } else {
      result_index_ = *r;
      result_yes_ = *slice_.variables[*r].find_state("yes");
    }
  } else {
    v.push_back("result node '" + result_ + "' is not a template variable");
  }
  if (static_result_) {
    auto s = static_.find(*static_result_);
    if (!s) {
      v.push_back("static result node '" + *static_result_ + "' is not a static variable");
    } else {
      auto st = static_.variable(*s).states;
      std::sort(st.begin(), st.end());
      if (st != std::vector<std::string>{"no", "yes"})
        v.push_back("static result node '" + *static_result_ + "' must have states {yes, no}");
    }
  }

  if (!v.empty()) return;
  initial_net_ = build_slice_network(true);
  transition_net_ = build_slice_network(false);
  for (const auto& msg : initial_net_.violations()) v.push_back("day-1 slice: " + msg);
  for (const auto& msg : transition_net_.violations()) v.push_back("slice: " + msg);
}

pgm::Network DbnSpec::build_slice_network(bool initial) const {
  std::vector<pgm::Variable> vars;
  std::vector<pgm::Cpt> cpts;
  for (int s : bridge_sources_) {
    vars.push_back(static_.variable(s));
    cpts.push_back(uniform_cpt(vars.back()));
  }
  if (!initial) {
    for (int k : interface_) {
      pgm::Variable prev = slice_.variables[k];
      prev.name = previous_token(prev.name);
      vars.push_back(prev);
      cpts.push_back(uniform_cpt(prev));
    }
  }
  for (int j = 0; j < static_cast<int>(slice_.variables.size()); ++j) {
    vars.push_back(slice_.variables[j]);
    cpts.push_back(cpt(j, initial));
  }
  return pgm::Network(std::move(vars), std::move(cpts));
}

int DbnSpec::template_offset(bool initial) const {
  return static_cast<int>(bridge_sources_.size() + (initial ? 0 : interface_.size()));
}

void DbnSpec::require_valid() const {
  if (valid()) return;
  std::string msg = "invalid DBN specification:";
  for (const auto& s : violations_) msg += " " + s + ";";
  throw SpecError(msg);
}

std::vector<Arc> DbnSpec::intra_slice_arcs() const {
  std::vector<Arc> arcs;
  for (int j = 0; j < static_cast<int>(parents_.size()); ++j)
    for (const auto& p : parents_[j])
      if (p.kind == ParentKind::same_day) arcs.emplace_back(slice_.variables[p.index].name, slice_.variables[j].name);
  return arcs;
}

const std::vector<DbnSpec::ParentRef>& DbnSpec::parents(int j, bool initial) const {
  return (initial && initial_of_[j] >= 0) ? initial_parents_[j] : parents_[j];
}

const pgm::Cpt& DbnSpec::cpt(int j, bool initial) const {
  return (initial && initial_of_[j] >= 0) ? slice_.initial_cpts[initial_of_[j]] : slice_.cpts[cpt_of_[j]];
}

bool DbnSpec::has_previous_parent(int j) const {
  return std::any_of(parents_[j].begin(), parents_[j].end(),
                     [](const ParentRef& p) { return p.kind == ParentKind::previous_day; });
}

DbnSpec DbnSpec::with_tables(pgm::Network static_slice, SliceTemplate slice) const {
  return DbnSpec(std::move(static_slice), std::move(slice), inter_, bridge_, result_, static_result_);
}

DbnSpec DbnSpec::with_uniform_tables() const {
  SliceTemplate t = slice_;
  auto uniform = [&](pgm::Cpt& c) {
    Eigen::Index rows = 1;
    for (const auto& p : c.parents)
      if (const auto* pv = lookup(p)) rows *= pv->cardinality();
    const int k = lookup(c.child) ? lookup(c.child)->cardinality() : 1;
    c.table = Eigen::MatrixXd::Constant(rows, k, 1.0 / k);
  };
  for (auto& c : t.cpts) uniform(c);
  for (auto& c : t.initial_cpts) uniform(c);
  return with_tables(static_.with_uniform_tables(), std::move(t));
}

void validate_timeline(const DbnSpec& spec, const EvidenceTimeline& timeline) {
  const auto& st = spec.static_slice();
  for (const auto& [name, label] : timeline.static_evidence) st.variable(st.index(name)).state_index(label);
  for (std::size_t d = 0; d < timeline.days.size(); ++d) {
    for (const auto& [name, label] : timeline.days[d]) {
      auto j = spec.find_temporal(name);
      if (!j) throw SchemaMismatch(name, "unknown temporal variable '" + name + "' on day " + std::to_string(d + 1));
      if (*j == spec.result_index())
        throw InputError("day " + std::to_string(d + 1) + " binds the result node '" + name + "'");
      spec.temporal_variables()[*j].state_index(label);
    }
  }
}

}  // namespace nirisk::dbn
