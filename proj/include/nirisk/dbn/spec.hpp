#pragma once

#include "nirisk/pgm/network.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nirisk::dbn {

using Arc = std::pair<std::string, std::string>;

// Temporal variables of one generic day.
//
// CPT parent tokens resolve as follows: "X" is template variable X on the
// same day, "X[t-1]" is X on the previous day, and any static-slice name is
// that static variable.  `initial_cpts` replace, on day 1, the CPT of every
// node that has a previous-day parent; their parents are the template
// parents with the previous-day ones removed.
struct SliceTemplate {
  std::vector<pgm::Variable> variables;
  std::vector<pgm::Cpt> cpts;
  std::vector<pgm::Cpt> initial_cpts;
};

// "X[t-1]"
std::string previous_token(const std::string& var);
// Unrolled node name of template variable `var` on `day`: "X[day]".
std::string slice_name(const std::string& var, int day);

// Two-part dynamic Bayesian network: a static slice fixed at admission and a
// first-order Markov template repeated once per day.
class DbnSpec {
 public:
  enum class ParentKind { same_day, previous_day, static_slice };
  struct ParentRef {
    ParentKind kind;
    int index;  // template index, or static-slice index
  };

  DbnSpec() = default;
  // Empty arc lists are derived from the CPT parents; non-empty ones must
  // agree with them.
  DbnSpec(pgm::Network static_slice, SliceTemplate slice, std::vector<Arc> inter_slice_arcs,
          std::vector<Arc> bridge_arcs, std::string result_node, std::optional<std::string> static_result_node = {});

  const pgm::Network& static_slice() const { return static_; }
  const SliceTemplate& slice() const { return slice_; }
  const std::vector<pgm::Variable>& temporal_variables() const { return slice_.variables; }
  const std::vector<Arc>& inter_slice_arcs() const { return inter_; }
  const std::vector<Arc>& bridge_arcs() const { return bridge_; }
  std::vector<Arc> intra_slice_arcs() const;
  const std::string& result_node() const { return result_; }
  const std::optional<std::string>& static_result_node() const { return static_result_; }

  bool valid() const { return violations_.empty(); }
  const std::vector<std::string>& violations() const { return violations_; }
  void require_valid() const;

  std::optional<int> find_temporal(std::string_view name) const;
  int result_index() const { return result_index_; }
  int result_yes_state() const { return result_yes_; }

  // Resolved parents of template variable j (template CPT, or the initial
  // CPT when `initial` and one exists).
  const std::vector<ParentRef>& parents(int j, bool initial = false) const;
  const pgm::Cpt& cpt(int j, bool initial = false) const;
  bool has_previous_parent(int j) const;

  // Template variables with an outgoing inter-slice arc, ascending.
  const std::vector<int>& interface_variables() const { return interface_; }
  // Static variables with an outgoing bridge arc, ascending.
  const std::vector<int>& bridge_sources() const { return bridge_sources_; }

  // Variable behind a parent token (static, template, or "X[t-1]").
  const pgm::Variable* lookup(const std::string& token) const;

  // One day as a standalone network.  Nodes are laid out as
  //   [bridge sources][previous-day interface copies][template variables]
  // (no previous-day block when `initial`).  The leading blocks are roots
  // with uniform tables standing in for their real distributions.
  const pgm::Network& slice_network(bool initial) const { return initial ? initial_net_ : transition_net_; }
  int template_offset(bool initial) const;

  // Same structure with every table uniform.
  DbnSpec with_uniform_tables() const;
  // Same structure with new tables.
  DbnSpec with_tables(pgm::Network static_slice, SliceTemplate slice) const;

 private:
  void resolve_and_validate();
  pgm::Network build_slice_network(bool initial) const;

  pgm::Network static_;
  SliceTemplate slice_;
  std::vector<Arc> inter_;
  std::vector<Arc> bridge_;
  std::string result_;
  std::optional<std::string> static_result_;

  std::vector<std::string> violations_;
  int result_index_ = -1;
  int result_yes_ = -1;
  std::vector<int> cpt_of_;
  std::vector<int> initial_of_;  // -1 when the node has no initial CPT
  std::vector<std::vector<ParentRef>> parents_;
  std::vector<std::vector<ParentRef>> initial_parents_;
  std::vector<int> interface_;
  std::vector<int> bridge_sources_;
  pgm::Network initial_net_;
  pgm::Network transition_net_;
};

// Evidence for one patient: static bindings plus one (possibly empty)
// assignment per day, day 1 first.
struct EvidenceTimeline {
  pgm::Assignment static_evidence;
  std::vector<pgm::Assignment> days;
};

// Throws SchemaMismatch for unknown variables or labels and InputError if a
// day binds the result node.
void validate_timeline(const DbnSpec& spec, const EvidenceTimeline& timeline);

struct TraceEntry {
  int day = 0;
  double probability = 0.0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// P(result = yes) per day, day 0 being the admission baseline.
struct PredictionTrace {
  std::vector<TraceEntry> entries;
  friend bool operator==(const PredictionTrace&, const PredictionTrace&) = default;
};

}  // namespace nirisk::dbn
