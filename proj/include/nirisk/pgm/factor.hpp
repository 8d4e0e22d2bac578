#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace nirisk::pgm {

class Network;

// Non-negative table over discrete variables identified by integer ids.
//
// `vars` is strictly ascending; `values` is laid out in mixed radix with the
// last variable varying fastest.  The represented function is
// exp(log_scale) * values, which lets long products stay in range: every
// operation below rescales its result so the largest entry is 1.
struct Factor {
  std::vector<int> vars;
  std::vector<int> cards;
  Eigen::ArrayXd values = Eigen::ArrayXd::Ones(1);
  double log_scale = 0.0;

  bool is_zero() const { return (values == 0.0).all(); }
  int position(int var) const;  // -1 when absent
};

Factor multiply(const Factor& a, const Factor& b);
Factor sum_out(const Factor& f, int var);
// Restrict `var` to one state and drop it from the scope.
Factor reduce(const Factor& f, int var, int state);
void rescale(Factor& f);

// Multiply all factors and sum out every variable not in `keep`, choosing the
// elimination order greedily (smallest intermediate table first, ties broken
// by lowest id).  The result's scope is `keep` intersected with the union of
// the inputs' scopes.
Factor eliminate(std::vector<Factor> factors, std::span<const int> keep);

// Linear-scale probabilities proportional to the factor, summing to one.
// Throws ImpossibleEvidence when the factor is identically zero.
Eigen::ArrayXd normalized(const Factor& f);

// One-hot factor over a single variable.
Factor indicator(int var, int card, int state);

// P(child | parents) of network node i as a factor over network indices.
Factor cpt_factor(const Network& net, int i);

}  // namespace nirisk::pgm
