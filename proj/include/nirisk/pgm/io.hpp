#pragma once

#include "nirisk/pgm/network.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>

namespace nirisk::pgm {

using json = nlohmann::json;

// Looser than the in-memory 1e-9 so decimal round-trips load cleanly.
inline constexpr double kLoadRowTolerance = 1e-6;

enum class Probabilities {
  required,  // every CPT needs a full set of rows
  optional,  // rows may be omitted; missing tables come out uniform
};

// Resolves a parent or child token to its variable (nullptr if unknown).
using VariableLookup = std::function<const Variable*(const std::string&)>;

json variable_to_json(const Variable& v);
Variable variable_from_json(const json& j);

// {"child","parents":[...],"rows":[{"given":{parent:state},"probs":[...]}]}
json cpt_to_json(const Cpt& cpt, const VariableLookup& lookup);
Cpt cpt_from_json(const json& j, const VariableLookup& lookup, Probabilities mode);

// {"variables":[{"name","states"}], "cpts":[...]}
json network_to_json(const Network& net);
// Throws FormatError for malformed documents and SpecError when the loaded
// network violates an invariant.
Network network_from_json(const json& j, Probabilities mode = Probabilities::required);

json read_json_file(const std::filesystem::path& path);
// Pretty-printed, newline-terminated.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace nirisk::pgm
