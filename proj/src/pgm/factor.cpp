#include "nirisk/pgm/factor.hpp"

#include "nirisk/errors.hpp"
#include "nirisk/pgm/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nirisk::pgm {

namespace {

std::vector<Eigen::Index> strides_of(const std::vector<int>& cards) {
  std::vector<Eigen::Index> s(cards.size(), 1);
  for (std::size_t k = cards.size(); k-- > 1;) s[k - 1] = s[k] * cards[k];
  return s;
}

Eigen::Index volume(const std::vector<int>& cards) {
  Eigen::Index n = 1;
  for (int c : cards) n *= c;
  return n;
}

}  // namespace

int Factor::position(int var) const {
  auto it = std::lower_bound(vars.begin(), vars.end(), var);
  if (it == vars.end() || *it != var) return -1;
  return static_cast<int>(it - vars.begin());
}

void rescale(Factor& f) {
  const double m = f.values.size() ? f.values.maxCoeff() : 0.0;
  if (m > 0.0 && m != 1.0) {
    f.values /= m;
    f.log_scale += std::log(m);
  }
}

Factor multiply(const Factor& a, const Factor& b) {
  Factor r;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(r.vars));
  const std::size_t m = r.vars.size();
  r.cards.resize(m);
  std::vector<Eigen::Index> sa(m, 0), sb(m, 0);
  const auto stride_a = strides_of(a.cards);
  const auto stride_b = strides_of(b.cards);
  for (std::size_t k = 0; k < m; ++k) {
    const int v = r.vars[k];
    if (int p = a.position(v); p >= 0) {
      r.cards[k] = a.cards[p];
      sa[k] = stride_a[p];
    }
    if (int p = b.position(v); p >= 0) {
      r.cards[k] = b.cards[p];
      sb[k] = stride_b[p];
    }
  }
  const Eigen::Index n = volume(r.cards);
  r.values.resize(n);
  std::vector<int> odo(m, 0);
  Eigen::Index ia = 0, ib = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.values[i] = a.values[ia] * b.values[ib];
    for (std::size_t k = m; k-- > 0;) {
      ++odo[k];
      ia += sa[k];
      ib += sb[k];
      if (odo[k] < r.cards[k]) break;
      ia -= sa[k] * r.cards[k];
      ib -= sb[k] * r.cards[k];
      odo[k] = 0;
    }
  }
  r.log_scale = a.log_scale + b.log_scale;
  rescale(r);
  return r;
}

Factor sum_out(const Factor& f, int var) {
  const int p = f.position(var);
  if (p < 0) return f;
  Factor r;
  r.vars = f.vars;
  r.cards = f.cards;
  r.vars.erase(r.vars.begin() + p);
  r.cards.erase(r.cards.begin() + p);
  Eigen::Index left = 1, right = 1;
  for (int k = 0; k < p; ++k) left *= f.cards[k];
  for (std::size_t k = p + 1; k < f.cards.size(); ++k) right *= f.cards[k];
  const int c = f.cards[p];
  r.values = Eigen::ArrayXd::Zero(left * right);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (int s = 0; s < c; ++s) {
      r.values.segment(l * right, right) += f.values.segment((l * c + s) * right, right);
    }
  }
  r.log_scale = f.log_scale;
  rescale(r);
  return r;
}

Factor reduce(const Factor& f, int var, int state) {
  const int p = f.position(var);
  if (p < 0) return f;
  Factor r;
  r.vars = f.vars;
  r.cards = f.cards;
  r.vars.erase(r.vars.begin() + p);
  r.cards.erase(r.cards.begin() + p);
  Eigen::Index left = 1, right = 1;
  for (int k = 0; k < p; ++k) left *= f.cards[k];
  for (std::size_t k = p + 1; k < f.cards.size(); ++k) right *= f.cards[k];
  const int c = f.cards[p];
  r.values.resize(left * right);
  for (Eigen::Index l = 0; l < left; ++l) {
    r.values.segment(l * right, right) = f.values.segment((l * c + state) * right, right);
  }
  r.log_scale = f.log_scale;
  rescale(r);
  return r;
}

Factor eliminate(std::vector<Factor> factors, std::span<const int> keep) {
  auto kept = [&](int v) { return std::find(keep.begin(), keep.end(), v) != keep.end(); };

  for (;;) {
    // Candidate variables and the table size their elimination would create.
    std::vector<int> candidates;
    for (const auto& f : factors)
      for (int v : f.vars)
        if (!kept(v)) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) break;

    int best = -1;
    double best_weight = std::numeric_limits<double>::infinity();
    for (int v : candidates) {
      std::vector<std::pair<int, int>> scope;
      for (const auto& f : factors) {
        if (f.position(v) < 0) continue;
        for (std::size_t k = 0; k < f.vars.size(); ++k) scope.emplace_back(f.vars[k], f.cards[k]);
      }
      std::sort(scope.begin(), scope.end());
      scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
      double w = 1.0;
      for (const auto& [id, card] : scope)
        if (id != v) w *= card;
      if (w < best_weight) {
        best_weight = w;
        best = v;
      }
    }

    Factor product;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.position(best) >= 0)
        product = multiply(product, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(product, best));
    factors = std::move(rest);
  }

  Factor result;
  for (const auto& f : factors) result = multiply(result, f);
  return result;
}

Eigen::ArrayXd normalized(const Factor& f) {
  const double total = f.values.sum();
  if (!(total > 0.0)) throw ImpossibleEvidence("evidence has probability zero under the model");
  return f.values / total;
}

Factor indicator(int var, int card, int state) {
  Factor f{{var}, {card}, Eigen::ArrayXd::Zero(card), 0.0};
  f.values(state) = 1.0;
  return f;
}

Factor cpt_factor(const Network& net, int i) {
  Factor f;
  const auto& pa = net.parents(i);
  std::vector<std::pair<int, int>> scope;
  scope.emplace_back(i, net.variable(i).cardinality());
  for (int p : pa) scope.emplace_back(p, net.variable(p).cardinality());
  std::sort(scope.begin(), scope.end());
  for (const auto& [v, c] : scope) {
    f.vars.push_back(v);
    f.cards.push_back(c);
  }
  const Eigen::Index n = volume(f.cards);
  f.values.resize(n);
  std::vector<int> states(net.size(), 0);
  std::vector<int> odo(f.vars.size(), 0);
  const auto& table = net.cpt(i).table;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < f.vars.size(); ++j) states[f.vars[j]] = odo[j];
    f.values[k] = table(net.row_of(i, states), states[i]);
    for (std::size_t j = f.vars.size(); j-- > 0;) {
      if (++odo[j] < f.cards[j]) break;
      odo[j] = 0;
    }
  }
  return f;
}

}  // namespace nirisk::pgm
