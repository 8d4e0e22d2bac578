#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nirisk::clinical::csv {

// One record per line; double-quoted fields may contain commas and doubled
// quotes but not newlines.  Returns nullopt for a field with an unterminated
// quote.
std::optional<std::vector<std::string>> split(const std::string& line);

bool read_line(std::istream& in, std::string& line);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace nirisk::clinical::csv
