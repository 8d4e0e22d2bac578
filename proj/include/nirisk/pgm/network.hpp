#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nirisk::pgm {

// A categorical random variable with an ordered, non-empty set of labels.
struct Variable {
  std::string name;
  std::vector<std::string> states;

  int cardinality() const { return static_cast<int>(states.size()); }
  std::optional<int> find_state(std::string_view label) const;
  // Throws SchemaMismatch naming this variable when the label is unknown.
  int state_index(std::string_view label) const;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Variable name -> state label.  Partial assignments act as evidence,
// complete ones as points of the joint distribution.
using Assignment = std::map<std::string, std::string>;

// Conditional probability table P(child | parents).
//
// Row r of `table` is the distribution of the child given parent
// configuration r.  Configurations are numbered in mixed radix over the
// parents' state counts, the last parent varying fastest.  Columns follow the
// child's state order.
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  Eigen::MatrixXd table;
};

struct Distribution {
  std::string variable;
  std::vector<std::string> states;
  Eigen::VectorXd probs;

  // Throws SchemaMismatch when the label is not one of `states`.
  double operator[](std::string_view state) const;
};

// Directed acyclic graph of categorical variables with one CPT per node.
//
// Construction never throws on a malformed model: problems are collected and
// reported by validate_network().  Inference entry points call
// require_valid() first.  A Network is immutable once built, so concurrent
// readers are safe.
class Network {
 public:
  Network() = default;
  Network(std::vector<Variable> variables, std::vector<Cpt> cpts);

  int size() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int i) const { return variables_[i]; }
  // CPT of variable i (aligned with variables() when the net is valid).
  const Cpt& cpt(int i) const { return cpts_[i]; }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  const std::vector<int>& parents(int i) const { return parent_index_[i]; }
  const std::vector<int>& children(int i) const { return child_index_[i]; }
  const std::vector<int>& topological_order() const { return topo_; }
  // Node indices sorted by variable name; products taken in this order do
  // not depend on how the variable list was declared.
  const std::vector<int>& name_order() const { return name_order_; }

  std::optional<int> find(std::string_view name) const;
  // Throws SchemaMismatch for unknown names.
  int index(std::string_view name) const;

  bool valid() const { return violations_.empty(); }
  const std::vector<std::string>& violations() const { return violations_; }
  // Throws SpecError listing the violations.
  void require_valid() const;

  std::size_t arc_count() const;

  // Row of cpt(i) selected by the parents' entries in a full state vector.
  Eigen::Index row_of(int i, std::span<const int> states) const;

  // Label-level <-> index-level conversion.  encode() yields -1 for unbound
  // variables and throws SchemaMismatch for unknown names or labels.
  std::vector<int> encode(const Assignment& a) const;
  Assignment decode(std::span<const int> states) const;

  // Same variables and parent sets, every CPT replaced by uniform rows.
  Network with_uniform_tables() const;

 private:
  void index_and_validate();

  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
  std::map<std::string, int, std::less<>> by_name_;
  std::vector<std::vector<int>> parent_index_;
  std::vector<std::vector<int>> child_index_;
  std::vector<std::vector<Eigen::Index>> row_stride_;
  std::vector<int> topo_;
  std::vector<int> name_order_;
  std::vector<std::string> violations_;
};

// Empty when every invariant holds; otherwise one message per violation,
// naming the offending node or row.
std::vector<std::string> validate_network(const Network& net);

// A network whose tables are uniform, from variables and parent lists.
Network make_structure(std::vector<Variable> variables,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& parents);

// Number of rows a CPT needs: product of the parents' cardinalities.
Eigen::Index row_count(const std::vector<int>& cardinalities);

// Decode a CPT row number into per-parent state indices.
std::vector<int> row_configuration(Eigen::Index row, const std::vector<int>& cardinalities);

}  // namespace nirisk::pgm
