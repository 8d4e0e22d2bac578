#include "oracle.hpp"

#include <map>
#include <stdexcept>

namespace oracle {

namespace {

using nirisk::pgm::Cpt;
using nirisk::pgm::Network;

int index_of(const Network& net, const std::string& name) {
  for (int i = 0; i < net.size(); ++i)
    if (net.variable(i).name == name) return i;
  throw std::logic_error("oracle: unknown variable " + name);
}

const Cpt& table_of(const Network& net, const std::string& name) {
  for (const auto& c : net.cpts())
    if (c.child == name) return c;
  throw std::logic_error("oracle: no table for " + name);
}

bool next(std::vector<int>& states, const std::vector<int>& cards) {
  for (int k = static_cast<int>(states.size()) - 1; k >= 0; --k) {
    if (++states[k] < cards[k]) return true;
    states[k] = 0;
  }
  return false;
}

}  // namespace

double joint(const Network& net, const std::vector<int>& states) {
  double p = 1.0;
  for (int i = 0; i < net.size(); ++i) {
    const auto& cpt = table_of(net, net.variable(i).name);
    long row = 0;
    for (const auto& parent : cpt.parents) {
      const int q = index_of(net, parent);
      row = row * net.variable(q).cardinality() + states[q];
    }
    p *= cpt.table(row, states[i]);
  }
  return p;
}

double total_mass(const Network& net) {
  std::vector<int> cards, states(net.size(), 0);
  for (const auto& v : net.variables()) cards.push_back(v.cardinality());
  double total = 0.0;
  do total += joint(net, states);
  while (next(states, cards));
  return total;
}

std::vector<double> posterior(const Network& net, int query, const std::vector<int>& evidence) {
  std::vector<int> cards, states(net.size(), 0);
  for (const auto& v : net.variables()) cards.push_back(v.cardinality());
  std::vector<double> mass(net.variable(query).cardinality(), 0.0);
  do {
    bool ok = true;
    for (int i = 0; i < net.size() && ok; ++i) ok = evidence[i] < 0 || evidence[i] == states[i];
    if (ok) mass[states[query]] += joint(net, states);
  } while (next(states, cards));
  double z = 0.0;
  for (double m : mass) z += m;
  if (z <= 0.0) throw std::domain_error("oracle: evidence has probability zero");
  for (double& m : mass) m /= z;
  return mass;
}

double filter(const nirisk::dbn::DbnSpec& spec, const nirisk::dbn::EvidenceTimeline& timeline, int t) {
  const auto& snet = spec.static_slice();
  const auto& tvars = spec.temporal_variables();
  const int ns = snet.size();
  const int nt = static_cast<int>(tvars.size());

  std::map<std::string, int> tindex;
  for (int j = 0; j < nt; ++j) tindex[tvars[j].name] = j;

  std::vector<int> cards, observed;
  for (int i = 0; i < ns; ++i) {
    cards.push_back(snet.variable(i).cardinality());
    auto it = timeline.static_evidence.find(snet.variable(i).name);
    observed.push_back(it == timeline.static_evidence.end() ? -1 : snet.variable(i).state_index(it->second));
  }
  for (int d = 0; d < t; ++d) {
    for (int j = 0; j < nt; ++j) {
      cards.push_back(tvars[j].cardinality());
      const auto& ev = timeline.days[d];
      auto it = ev.find(tvars[j].name);
      observed.push_back(it == ev.end() ? -1 : tvars[j].state_index(it->second));
    }
  }

  // Every node as (table, parent positions) over the flat state vector.
  struct Node {
    const Eigen::MatrixXd* table;
    std::vector<int> parents;
    std::vector<int> parent_cards;
    int pos;
  };
  auto token_pos = [&](const std::string& token, int d) {
    if (token.size() > 5 && token.compare(token.size() - 5, 5, "[t-1]") == 0)
      return ns + (d - 2) * nt + tindex.at(token.substr(0, token.size() - 5));
    if (auto it = tindex.find(token); it != tindex.end()) return ns + (d - 1) * nt + it->second;
    return index_of(snet, token);
  };
  auto day_table = [&](const std::string& child, int d) -> const Cpt& {
    if (d == 1)
      for (const auto& c : spec.slice().initial_cpts)
        if (c.child == child) return c;
    for (const auto& c : spec.slice().cpts)
      if (c.child == child) return c;
    throw std::logic_error("oracle: no template table for " + child);
  };
  std::vector<Node> nodes;
  for (int i = 0; i < ns; ++i) {
    const auto& cpt = table_of(snet, snet.variable(i).name);
    Node n{&cpt.table, {}, {}, i};
    for (const auto& p : cpt.parents) {
      n.parents.push_back(index_of(snet, p));
      n.parent_cards.push_back(cards[n.parents.back()]);
    }
    nodes.push_back(std::move(n));
  }
  for (int d = 1; d <= t; ++d) {
    for (int j = 0; j < nt; ++j) {
      const auto& cpt = day_table(tvars[j].name, d);
      Node n{&cpt.table, {}, {}, ns + (d - 1) * nt + j};
      for (const auto& p : cpt.parents) {
        n.parents.push_back(token_pos(p, d));
        n.parent_cards.push_back(cards[n.parents.back()]);
      }
      nodes.push_back(std::move(n));
    }
  }

  const int result_pos = ns + (t - 1) * nt + tindex.at(spec.result_node());
  const int yes = tvars[tindex.at(spec.result_node())].state_index("yes");
  // Observed positions are pinned; only the free ones are enumerated.
  std::vector<int> free_cards(cards.size());
  for (std::size_t k = 0; k < cards.size(); ++k) free_cards[k] = observed[k] >= 0 ? 1 : cards[k];
  std::vector<int> counter(cards.size(), 0), s(cards.size(), 0);
  double num = 0.0, den = 0.0;
  do {
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = observed[k] >= 0 ? observed[k] : counter[k];
    double p = 1.0;
    for (const auto& n : nodes) {
      long row = 0;
      for (std::size_t q = 0; q < n.parents.size(); ++q) row = row * n.parent_cards[q] + s[n.parents[q]];
      p *= (*n.table)(row, s[n.pos]);
      if (p == 0.0) break;
    }
    den += p;
    if (s[result_pos] == yes) num += p;
  } while (next(counter, free_cards));
  if (den <= 0.0) throw std::domain_error("oracle: evidence has probability zero");
  return num / den;
}

}  // namespace oracle
