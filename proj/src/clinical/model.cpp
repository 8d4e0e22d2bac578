#include "nirisk/clinical/model.hpp"

#include "nirisk/errors.hpp"

#include <functional>
#include <map>

namespace nirisk::clinical {

namespace {

using Row = Eigen::RowVectorXd;
using RowFn = std::function<Row(const std::vector<int>&)>;

Row row(std::initializer_list<double> p) {
  Row r(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double x : p) r(i++) = x;
  return r;
}

Row binary_row(double yes) { return row({yes, 1.0 - yes}); }

std::vector<std::string> static_parents(const ClinicalSchema& s, const std::string& name) {
  auto has = [&](const char* v) { return s.find_fixed(v) != nullptr; };
  if (name == s.result) return {};
  if (name == "detorig" && has("orig")) return {"orig"};
  if (name == "cissue" && has("age1")) return {"age1"};
  if ((name == "priseAnti" || name == "ant") && has("age1")) return {"age1", s.result};
  return {s.result};
}

// Fills every row of `cpt` from the parents' state indices.
void fill(pgm::Cpt& cpt, const std::vector<int>& cards, const RowFn& fn) {
  for (Eigen::Index r = 0; r < cpt.table.rows(); ++r) {
    Row p = fn(pgm::row_configuration(r, cards));
    if (p.size() != cpt.table.cols()) throw SpecError("table row width mismatch for '" + cpt.child + "'");
    cpt.table.row(r) = p;
  }
}

std::vector<int> cards_of(const dbn::DbnSpec& spec, const pgm::Cpt& cpt) {
  std::vector<int> cards;
  for (const auto& p : cpt.parents) cards.push_back(spec.lookup(p)->cardinality());
  return cards;
}

}  // namespace

dbn::DbnSpec default_structure(const ClinicalSchema& schema) {
  if (!schema.find_fixed(schema.result)) throw SpecError("schema has no fixed '" + schema.result + "'");
  if (!schema.find_temporal(schema.result_t)) throw SpecError("schema has no temporal '" + schema.result_t + "'");

  std::vector<std::pair<std::string, std::vector<std::string>>> parents;
  for (const auto& f : schema.fixed) parents.emplace_back(f.variable.name, static_parents(schema, f.variable.name));
  auto static_net = pgm::make_structure(schema.fixed_variables(), parents);

  auto uniform = [](const std::string& child, std::vector<std::string> ps, const std::vector<int>& cards, int k) {
    Eigen::Index rows = pgm::row_count(cards);
    return pgm::Cpt{child, std::move(ps), Eigen::MatrixXd::Constant(rows, k, 1.0 / k)};
  };
  const int result_card = schema.find_fixed(schema.result)->variable.cardinality();
  dbn::SliceTemplate t;
  t.variables = schema.temporal;
  for (const auto& v : schema.temporal) {
    if (v.name == schema.result_t) {
      t.cpts.push_back(uniform(v.name, {dbn::previous_token(v.name), schema.result},
                               {v.cardinality(), result_card}, v.cardinality()));
      t.initial_cpts.push_back(uniform(v.name, {schema.result}, {result_card}, v.cardinality()));
    } else {
      const int rt = schema.find_temporal(schema.result_t)->cardinality();
      t.cpts.push_back(uniform(v.name, {schema.result_t}, {rt}, v.cardinality()));
    }
  }
  dbn::DbnSpec spec(std::move(static_net), std::move(t), {}, {}, schema.result_t, schema.result);
  spec.require_valid();
  return spec;
}

std::vector<double> uniform_stay_weights(int min_days, int max_days) {
  if (min_days < 1 || max_days < min_days) throw InputError("stay range must satisfy 1 <= min <= max");
  std::vector<double> w(static_cast<std::size_t>(max_days), 0.0);
  for (int d = min_days; d <= max_days; ++d) w[d - 1] = 1.0;
  return w;
}

Eigen::RowVectorXd stay_bin_distribution(const Derivation& stay_length, const std::vector<double>& weights) {
  Row p = Row::Zero(static_cast<Eigen::Index>(stay_length.edges.size()));
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] < 0) throw InputError("stay weights must be non-negative");
    if (weights[k] == 0) continue;
    const int b = bin_index(stay_length.edges, static_cast<double>(k));  // stay of k+1 days lasts k whole days
    if (b < 0) throw BinningError("stay length", std::to_string(k));
    p(b) += weights[k];
    total += weights[k];
  }
  if (total <= 0) throw InputError("stay weights must have positive total");
  return p / total;
}

dbn::DbnSpec ground_truth_spec(const ClinicalSchema& schema, const std::vector<double>& stay_weights) {
  const auto structure = default_structure(schema);
  const std::string& R = schema.result;

  // Static tables; the result parent, when present, is always listed last.
  std::map<std::string, RowFn> by_result = {
      {"sex", [](auto& c) { return c.back() == 0 ? row({0.6, 0.4}) : row({0.55, 0.45}); }},
      {"age1", [](auto& c) { return c.back() == 0 ? row({0.05, 0.2, 0.35, 0.4}) : row({0.1, 0.3, 0.35, 0.25}); }},
      {"periode_entr",
       [](auto& c) { return c.back() == 0 ? row({0.3, 0.25, 0.2, 0.25}) : row({0.25, 0.25, 0.25, 0.25}); }},
      {"orig", [](auto& c) { return c.back() == 0 ? row({0.3, 0.4, 0.3}) : row({0.5, 0.3, 0.2}); }},
      {"knaus", [](auto& c) { return c.back() == 0 ? row({0.1, 0.2, 0.3, 0.4}) : row({0.3, 0.3, 0.25, 0.15}); }},
      {"diag", [](auto& c) { return c.back() == 0 ? row({0.4, 0.4, 0.2}) : row({0.5, 0.3, 0.2}); }},
      {"detorig",
       [](auto& c) {
         static const Row rows[] = {row({0.6, 0.1, 0.2, 0.1}), row({0.2, 0.4, 0.3, 0.1}), row({0.3, 0.3, 0.3, 0.1})};
         return rows[c[0]];
       }},
      {"cissue",
       [](auto& c) {
         static const double dead[] = {0.05, 0.08, 0.15, 0.25};
         return row({1.0 - dead[c[0]], dead[c[0]]});
       }},
      {"priseAnti",
       [](auto& c) {
         static const double base[] = {0.2, 0.3, 0.4, 0.5};
         return binary_row(base[c[0]] + (c.back() == 0 ? 0.2 : 0.0));
       }},
      {"ant",
       [](auto& c) {
         static const double base[] = {0.1, 0.2, 0.35, 0.5};
         return binary_row(base[c[0]] + (c.back() == 0 ? 0.15 : 0.0));
       }},
  };

  // Hand-set tables apply only where the variable and its parents keep their
  // built-in states; anything else stays uniform.
  const auto builtin = default_schema(true);
  const auto& snet = structure.static_slice();
  auto builtin_var = [&](const pgm::Variable& v) {
    const auto* f = builtin.find_fixed(v.name);
    return f && f->variable == v;
  };
  auto builtin_family = [&](int i) {
    if (!builtin_var(snet.variable(i))) return false;
    for (int p : snet.parents(i))
      if (!builtin_var(snet.variable(p))) return false;
    return true;
  };
  std::vector<pgm::Cpt> static_cpts;
  for (int i = 0; i < snet.size(); ++i) {
    pgm::Cpt cpt = snet.cpt(i);
    const auto& var = snet.variable(i);
    const FixedVariable* fv = schema.find_fixed(var.name);
    std::vector<int> cards;
    for (int p : snet.parents(i)) cards.push_back(snet.variable(p).cardinality());
    if (var.name == R) {
      fill(cpt, cards, [](auto&) { return binary_row(0.3); });
    } else if (fv && fv->derive.kind == Derivation::Kind::stay_length) {
      Row p = stay_bin_distribution(fv->derive, stay_weights);
      fill(cpt, cards, [&](auto&) { return p; });
    } else if (auto it = by_result.find(var.name); it != by_result.end() && builtin_family(i)) {
      fill(cpt, cards, it->second);
    }
    static_cpts.push_back(std::move(cpt));
  }

  dbn::SliceTemplate t = structure.slice();
  for (auto& cpt : t.cpts) {
    const auto cards = cards_of(structure, cpt);
    const std::string& v = cpt.child;
    if (cards.back() != 2) continue;
    if (v == schema.result_t) {
      // parents: result_t[t-1], result
      fill(cpt, cards, [](auto& c) { return c[0] == 0 ? binary_row(1.0) : binary_row(c[1] == 0 ? 0.12 : 0.02); });
    } else if (v.rfind("act_", 0) == 0 && cpt.table.cols() == 2) {
      const int k = std::stoi(v.substr(4));
      fill(cpt, cards, [k](auto& c) { return binary_row(c[0] == 0 ? 0.55 + 0.02 * (k % 3) : 0.4); });
    } else if (v.rfind("examinf_", 0) == 0 && cpt.table.cols() == 2) {
      const int k = std::stoi(v.substr(8));
      fill(cpt, cards, [k](auto& c) { return binary_row(c[0] == 0 ? 0.2 + 0.01 * (k % 5) : 0.1); });
    } else if (v == "sens" && cpt.table.cols() == 3) {
      fill(cpt, cards, [](auto& c) { return c[0] == 0 ? row({0.3, 0.3, 0.4}) : row({0.1, 0.05, 0.85}); });
    } else if (v == "cissue_t" && cpt.table.cols() == 2) {
      fill(cpt, cards, [](auto& c) { return c[0] == 0 ? row({0.9, 0.1}) : row({0.97, 0.03}); });
    }
  }
  for (auto& cpt : t.initial_cpts) {
    const auto cards = cards_of(structure, cpt);
    if (cpt.child == schema.result_t && cards[0] == 2 && cpt.table.cols() == 2)
      fill(cpt, cards, [](auto& c) { return binary_row(c[0] == 0 ? 0.35 : 0.05); });
  }

  auto spec = structure.with_tables(pgm::Network(schema.fixed_variables(), std::move(static_cpts)), std::move(t));
  spec.require_valid();
  return spec;
}

}  // namespace nirisk::clinical
