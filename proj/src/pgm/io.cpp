#include "nirisk/pgm/io.hpp"

#include "nirisk/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace nirisk::pgm {

namespace {

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw FormatError(where + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

json variable_to_json(const Variable& v) { return json{{"name", v.name}, {"states", v.states}}; }

Variable variable_from_json(const json& j) {
  Variable v;
  const auto& name = member(j, "name", "variable");
  if (!name.is_string()) throw FormatError("variable: \"name\" must be a string");
  v.name = name.get<std::string>();
  v.states = string_list(member(j, "states", "variable '" + v.name + "'"), "variable '" + v.name + "' states");
  return v;
}

json cpt_to_json(const Cpt& cpt, const VariableLookup& lookup) {
  std::vector<const Variable*> pvars;
  std::vector<int> cards;
  for (const auto& p : cpt.parents) {
    pvars.push_back(lookup(p));
    cards.push_back(pvars.back()->cardinality());
  }
  json rows = json::array();
  for (Eigen::Index r = 0; r < cpt.table.rows(); ++r) {
    const auto config = row_configuration(r, cards);
    json given = json::object();
    for (std::size_t k = 0; k < pvars.size(); ++k) given[cpt.parents[k]] = pvars[k]->states[config[k]];
    std::vector<double> probs(cpt.table.cols());
    for (Eigen::Index c = 0; c < cpt.table.cols(); ++c) probs[c] = cpt.table(r, c);
    rows.push_back(json{{"given", given}, {"probs", probs}});
  }
  return json{{"child", cpt.child}, {"parents", cpt.parents}, {"rows", rows}};
}

Cpt cpt_from_json(const json& j, const VariableLookup& lookup, Probabilities mode) {
  Cpt cpt;
  const auto& child = member(j, "child", "cpt");
  if (!child.is_string()) throw FormatError("cpt: \"child\" must be a string");
  cpt.child = child.get<std::string>();
  const std::string where = "cpt of '" + cpt.child + "'";
  cpt.parents = j.contains("parents") ? string_list(j.at("parents"), where + " parents") : std::vector<std::string>{};

  const Variable* cv = lookup(cpt.child);
  if (!cv) throw FormatError(where + ": unknown variable");
  std::vector<const Variable*> pvars;
  std::vector<int> cards;
  for (const auto& p : cpt.parents) {
    const Variable* pv = lookup(p);
    if (!pv) throw FormatError(where + ": unknown parent '" + p + "'");
    pvars.push_back(pv);
    cards.push_back(pv->cardinality());
  }
  const Eigen::Index nrows = row_count(cards);
  const int k = cv->cardinality();

  if (!j.contains("rows")) {
    if (mode == Probabilities::required) throw FormatError(where + ": missing \"rows\"");
    cpt.table = Eigen::MatrixXd::Constant(nrows, k, 1.0 / k);
    return cpt;
  }
  const auto& rows = j.at("rows");
  if (!rows.is_array()) throw FormatError(where + ": \"rows\" must be an array");

  cpt.table = Eigen::MatrixXd::Constant(nrows, k, std::nan(""));
  std::set<Eigen::Index> filled;
  for (const auto& row : rows) {
    const auto& given = row.contains("given") ? row.at("given") : json::object();
    if (!given.is_object() || given.size() != cpt.parents.size())
      throw FormatError(where + ": every row must bind exactly the parents");
    Eigen::Index r = 0;
    for (std::size_t p = 0; p < cpt.parents.size(); ++p) {
      if (!given.contains(cpt.parents[p]) || !given.at(cpt.parents[p]).is_string())
        throw FormatError(where + ": row does not bind parent '" + cpt.parents[p] + "'");
      const auto label = given.at(cpt.parents[p]).get<std::string>();
      auto s = pvars[p]->find_state(label);
      if (!s) throw FormatError(where + ": '" + label + "' is not a state of '" + cpt.parents[p] + "'");
      r = r * cards[p] + *s;
    }
    if (!filled.insert(r).second) throw FormatError(where + ": duplicate row " + given.dump());
    const auto& probs = member(row, "probs", where);
    if (!probs.is_array() || static_cast<int>(probs.size()) != k)
      throw FormatError(where + ": row " + given.dump() + " needs " + std::to_string(k) + " probabilities");
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      if (!probs[c].is_number()) throw FormatError(where + ": probabilities must be numbers");
      const double p = probs[c].get<double>();
      if (!(p >= 0.0 && p <= 1.0)) throw FormatError(where + ": row " + given.dump() + " has an entry outside [0,1]");
      cpt.table(r, c) = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > kLoadRowTolerance)
      throw FormatError(where + ": row " + given.dump() + " sums to " + std::to_string(sum));
    if (std::abs(sum - 1.0) > 1e-9) cpt.table.row(r) /= sum;
  }
  if (static_cast<Eigen::Index>(filled.size()) != nrows)
    throw FormatError(where + ": has " + std::to_string(filled.size()) + " rows, expected " + std::to_string(nrows));
  return cpt;
}

json network_to_json(const Network& net) {
  json vars = json::array();
  for (const auto& v : net.variables()) vars.push_back(variable_to_json(v));
  auto lookup = [&](const std::string& name) -> const Variable* {
    auto i = net.find(name);
    return i ? &net.variable(*i) : nullptr;
  };
  json cpts = json::array();
  for (const auto& cpt : net.cpts()) cpts.push_back(cpt_to_json(cpt, lookup));
  return json{{"variables", vars}, {"cpts", cpts}};
}

Network network_from_json(const json& j, Probabilities mode) {
  std::vector<Variable> vars;
  const auto& jv = member(j, "variables", "network");
  if (!jv.is_array()) throw FormatError("network: \"variables\" must be an array");
  for (const auto& v : jv) vars.push_back(variable_from_json(v));
  auto lookup = [&](const std::string& name) -> const Variable* {
    for (const auto& v : vars)
      if (v.name == name) return &v;
    return nullptr;
  };
  std::vector<Cpt> cpts;
  const auto& jc = member(j, "cpts", "network");
  if (!jc.is_array()) throw FormatError("network: \"cpts\" must be an array");
  for (const auto& c : jc) cpts.push_back(cpt_from_json(c, lookup, mode));
  Network net(std::move(vars), std::move(cpts));
  net.require_valid();
  return net;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace nirisk::pgm
