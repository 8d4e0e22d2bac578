#include "nirisk/pgm/network.hpp"

#include "nirisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace nirisk::pgm {

namespace {

constexpr double kRowTolerance = 1e-9;

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string describe_row(const Cpt& cpt, const std::vector<std::string>& labels) {
  if (cpt.parents.empty()) return "(root)";
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < cpt.parents.size(); ++k) {
    parts.push_back(cpt.parents[k] + "=" + labels[k]);
  }
  return "{" + join(parts, ",") + "}";
}

}  // namespace

std::optional<int> Variable::find_state(std::string_view label) const {
  for (int s = 0; s < cardinality(); ++s) {
    if (states[s] == label) return s;
  }
  return std::nullopt;
}

int Variable::state_index(std::string_view label) const {
  if (auto s = find_state(label)) return *s;
  throw SchemaMismatch(name, "state '" + std::string(label) + "' is not a state of '" + name + "'");
}

double Distribution::operator[](std::string_view state) const {
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s] == state) return probs[static_cast<Eigen::Index>(s)];
  }
  throw SchemaMismatch(variable, "state '" + std::string(state) + "' is not a state of '" + variable + "'");
}

Eigen::Index row_count(const std::vector<int>& cardinalities) {
  Eigen::Index n = 1;
  for (int c : cardinalities) n *= c;
  return n;
}

std::vector<int> row_configuration(Eigen::Index row, const std::vector<int>& cardinalities) {
  std::vector<int> config(cardinalities.size(), 0);
  for (std::size_t k = cardinalities.size(); k-- > 0;) {
    config[k] = static_cast<int>(row % cardinalities[k]);
    row /= cardinalities[k];
  }
  return config;
}

Network::Network(std::vector<Variable> variables, std::vector<Cpt> cpts)
    : variables_(std::move(variables)) {
  // Align CPTs with the variable order; leftovers are reported as violations.
  std::vector<std::string> early;
  std::map<std::string, int, std::less<>> names;
  for (int i = 0; i < size(); ++i) names.emplace(variables_[i].name, i);

  cpts_.resize(variables_.size());
  std::vector<bool> seen(variables_.size(), false);
  for (auto& cpt : cpts) {
    auto it = names.find(cpt.child);
    if (it == names.end()) {
      early.push_back("cpt for unknown variable '" + cpt.child + "'");
      continue;
    }
    if (seen[it->second]) {
      early.push_back("more than one cpt for '" + cpt.child + "'");
      continue;
    }
    seen[it->second] = true;
    cpts_[it->second] = std::move(cpt);
  }
  for (int i = 0; i < size(); ++i) {
    if (!seen[i]) {
      early.push_back("no cpt for '" + variables_[i].name + "'");
      cpts_[i].child = variables_[i].name;
    }
  }
  violations_ = std::move(early);
  index_and_validate();
}

void Network::index_and_validate() {
  const int n = size();
  std::vector<std::string> v;

  for (int i = 0; i < n; ++i) {
    const auto& var = variables_[i];
    if (var.name.empty()) v.push_back("variable #" + std::to_string(i) + " has an empty name");
    if (!by_name_.emplace(var.name, i).second) v.push_back("duplicate variable name '" + var.name + "'");
    if (var.cardinality() < 2) v.push_back("variable '" + var.name + "' has fewer than 2 states");
    std::set<std::string> labels(var.states.begin(), var.states.end());
    if (labels.size() != var.states.size()) v.push_back("variable '" + var.name + "' has duplicate state labels");
  }

  name_order_.clear();
  for (const auto& [name, i] : by_name_) name_order_.push_back(i);

  parent_index_.assign(n, {});
  child_index_.assign(n, {});
  row_stride_.assign(n, {});
  bool parents_ok = true;
  for (int i = 0; i < n; ++i) {
    const auto& cpt = cpts_[i];
    std::set<std::string> uniq;
    for (const auto& p : cpt.parents) {
      auto it = by_name_.find(p);
      if (it == by_name_.end()) {
        v.push_back("cpt of '" + cpt.child + "' names unknown parent '" + p + "'");
        parents_ok = false;
        continue;
      }
      if (!uniq.insert(p).second) {
        v.push_back("cpt of '" + cpt.child + "' lists parent '" + p + "' twice");
        parents_ok = false;
        continue;
      }
      parent_index_[i].push_back(it->second);
      child_index_[it->second].push_back(i);
    }
  }

  // Kahn's algorithm; whatever remains lies on or behind a cycle.
  std::vector<int> indegree(n, 0);
  for (int i = 0; i < n; ++i) indegree[i] = static_cast<int>(parent_index_[i].size());
  std::vector<int> ready;
  for (int i = n - 1; i >= 0; --i)
    if (indegree[i] == 0) ready.push_back(i);
  topo_.clear();
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    topo_.push_back(u);
    for (int c : child_index_[u]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (static_cast<int>(topo_.size()) != n) {
    // Walk parent links among the remaining nodes until a node repeats.
    std::vector<int> pos(n, -1);
    int start = 0;
    while (indegree[start] == 0) ++start;
    std::vector<int> path;
    int u = start;
    while (pos[u] < 0) {
      pos[u] = static_cast<int>(path.size());
      path.push_back(u);
      int next = -1;
      for (int p : parent_index_[u]) {
        if (indegree[p] > 0) {
          next = p;
          break;
        }
      }
      u = next;
    }
    std::vector<std::string> cycle;
    for (std::size_t k = pos[u]; k < path.size(); ++k) cycle.push_back(variables_[path[k]].name);
    std::reverse(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
    v.push_back("cycle through " + join(cycle, ","));
    topo_.clear();
  }

  if (parents_ok) {
    for (int i = 0; i < n; ++i) {
      const auto& cpt = cpts_[i];
      const auto& pa = parent_index_[i];
      std::vector<int> cards;
      for (int p : pa) cards.push_back(variables_[p].cardinality());
      auto& stride = row_stride_[i];
      stride.assign(pa.size(), 1);
      for (std::size_t k = pa.size(); k-- > 1;) stride[k - 1] = stride[k] * cards[k];

      const Eigen::Index rows = row_count(cards);
      if (cpt.table.rows() != rows || cpt.table.cols() != variables_[i].cardinality()) {
        std::ostringstream os;
        os << "cpt of '" << cpt.child << "' has shape " << cpt.table.rows() << "x" << cpt.table.cols()
           << ", expected " << rows << "x" << variables_[i].cardinality();
        v.push_back(os.str());
        continue;
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        auto row = cpt.table.row(r);
        const bool in_range = (row.array() >= 0.0).all() && (row.array() <= 1.0).all();
        const double sum = row.sum();
        if (!in_range || !(std::abs(sum - 1.0) <= kRowTolerance)) {
          auto config = row_configuration(r, cards);
          std::vector<std::string> labels;
          for (std::size_t k = 0; k < pa.size(); ++k) labels.push_back(variables_[pa[k]].states[config[k]]);
          std::ostringstream os;
          os << "cpt of '" << cpt.child << "' row " << describe_row(cpt, labels);
          if (!in_range)
            os << " has an entry outside [0,1]";
          else
            os << " sums to " << sum;
          v.push_back(os.str());
        }
      }
    }
  }

  violations_.insert(violations_.end(), v.begin(), v.end());
}

std::optional<int> Network::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int Network::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw SchemaMismatch(std::string(name), "unknown variable '" + std::string(name) + "'");
}

void Network::require_valid() const {
  if (!valid()) throw SpecError("invalid network: " + join(violations_, "; "));
}

std::size_t Network::arc_count() const {
  std::size_t n = 0;
  for (const auto& pa : parent_index_) n += pa.size();
  return n;
}

Eigen::Index Network::row_of(int i, std::span<const int> states) const {
  const auto& pa = parent_index_[i];
  const auto& stride = row_stride_[i];
  Eigen::Index r = 0;
  for (std::size_t k = 0; k < pa.size(); ++k) r += stride[k] * states[pa[k]];
  return r;
}

std::vector<int> Network::encode(const Assignment& a) const {
  std::vector<int> states(variables_.size(), -1);
  for (const auto& [name, label] : a) {
    const int i = index(name);
    states[i] = variables_[i].state_index(label);
  }
  return states;
}

Assignment Network::decode(std::span<const int> states) const {
  Assignment a;
  for (int i = 0; i < size(); ++i) {
    if (states[i] >= 0) a.emplace(variables_[i].name, variables_[i].states[states[i]]);
  }
  return a;
}

Network Network::with_uniform_tables() const {
  std::vector<Cpt> cpts = cpts_;
  for (int i = 0; i < size(); ++i) {
    std::vector<int> cards;
    for (const auto& p : cpts[i].parents) {
      auto j = find(p);
      cards.push_back(j ? variables_[*j].cardinality() : 1);
    }
    const int k = variables_[i].cardinality();
    cpts[i].table = Eigen::MatrixXd::Constant(row_count(cards), k, k > 0 ? 1.0 / k : 0.0);
  }
  return Network(variables_, std::move(cpts));
}

std::vector<std::string> validate_network(const Network& net) { return net.violations(); }

Network make_structure(std::vector<Variable> variables,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& parents) {
  std::vector<Cpt> cpts;
  for (const auto& var : variables) {
    Cpt cpt;
    cpt.child = var.name;
    for (const auto& [child, pa] : parents) {
      if (child == var.name) cpt.parents = pa;
    }
    cpts.push_back(std::move(cpt));
  }
  return Network(std::move(variables), std::move(cpts)).with_uniform_tables();
}

}  // namespace nirisk::pgm
