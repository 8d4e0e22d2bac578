#include "nirisk/pgm/inference.hpp"

#include "nirisk/errors.hpp"

#include <algorithm>
#include <limits>

namespace nirisk::pgm {

namespace {

// Nodes whose CPTs can influence the query given the evidence: the query and
// evidence nodes plus all their ancestors.  Everything else sums to one.
std::vector<bool> relevant_nodes(const Network& net, std::span<const int> query, std::span<const int> evidence) {
  std::vector<bool> keep(net.size(), false);
  std::vector<int> stack(query.begin(), query.end());
  for (int i = 0; i < net.size(); ++i)
    if (evidence[i] >= 0) stack.push_back(i);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (keep[u]) continue;
    keep[u] = true;
    for (int p : net.parents(u)) stack.push_back(p);
  }
  return keep;
}

Distribution to_distribution(const Network& net, int q, const Eigen::ArrayXd& probs) {
  Distribution d;
  d.variable = net.variable(q).name;
  d.states = net.variable(q).states;
  d.probs = probs.matrix();
  return d;
}

int checked_query(const Network& net, std::string_view query, const std::vector<int>& evidence) {
  const int q = net.index(query);
  if (evidence[q] >= 0) throw InputError("query '" + std::string(query) + "' is bound in the evidence");
  return q;
}

}  // namespace

std::uint64_t joint_state_count(const Network& net) {
  std::uint64_t n = 1;
  for (const auto& v : net.variables()) {
    const auto c = static_cast<std::uint64_t>(v.cardinality());
    if (c != 0 && n > std::numeric_limits<std::uint64_t>::max() / c) return std::numeric_limits<std::uint64_t>::max();
    n *= c;
  }
  return n;
}

double joint_probability(const Network& net, std::span<const int> states) {
  double p = 1.0;
  for (int i : net.name_order()) p *= net.cpt(i).table(net.row_of(i, states), states[i]);
  return p;
}

double joint_probability(const Network& net, const Assignment& full) {
  net.require_valid();
  auto states = net.encode(full);
  for (int i = 0; i < net.size(); ++i) {
    if (states[i] < 0) throw IncompleteAssignment("variable '" + net.variable(i).name + "' is unbound");
  }
  return joint_probability(net, std::span<const int>(states));
}

Factor joint_posterior(const Network& net, std::span<const int> query, std::span<const int> evidence) {
  net.require_valid();
  const auto keep = relevant_nodes(net, query, evidence);
  std::vector<Factor> factors;
  for (int i = 0; i < net.size(); ++i) {
    if (!keep[i]) continue;
    Factor f = cpt_factor(net, i);
    for (int v : std::vector<int>(f.vars)) {
      if (evidence[v] < 0) continue;
      // Observed query nodes stay in scope as point masses.
      if (std::find(query.begin(), query.end(), v) != query.end())
        f = multiply(f, indicator(v, net.variable(v).cardinality(), evidence[v]));
      else
        f = reduce(f, v, evidence[v]);
    }
    if (f.is_zero()) throw ImpossibleEvidence("evidence has probability zero under the model");
    factors.push_back(std::move(f));
  }
  Factor joint = eliminate(std::move(factors), query);
  joint.values = normalized(joint);
  joint.log_scale = 0.0;
  return joint;
}

Distribution posterior(const Network& net, std::string_view query, const Assignment& evidence) {
  net.require_valid();
  const auto ev = net.encode(evidence);
  const int q = checked_query(net, query, ev);
  const int qs[] = {q};
  Factor f = joint_posterior(net, qs, ev);
  return to_distribution(net, q, f.values);
}

Distribution posterior_enumeration(const Network& net, std::string_view query, const Assignment& evidence) {
  net.require_valid();
  const auto ev = net.encode(evidence);
  const int q = checked_query(net, query, ev);
  if (joint_state_count(net) > kEnumerationLimit)
    throw RangeError("network has more than 2^22 joint states; enumeration refused");

  const int n = net.size();
  std::vector<int> states(n, 0);
  std::vector<int> free;
  for (int i = 0; i < n; ++i) {
    if (ev[i] >= 0)
      states[i] = ev[i];
    else
      free.push_back(i);
  }
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(net.variable(q).cardinality());
  for (;;) {
    acc[states[q]] += joint_probability(net, std::span<const int>(states));
    std::size_t k = free.size();
    while (k > 0) {
      const int v = free[k - 1];
      if (++states[v] < net.variable(v).cardinality()) break;
      states[v] = 0;
      --k;
    }
    if (k == 0) break;
  }
  const double total = acc.sum();
  if (!(total > 0.0)) throw ImpossibleEvidence("evidence has probability zero under the model");
  return to_distribution(net, q, acc / total);
}

}  // namespace nirisk::pgm
