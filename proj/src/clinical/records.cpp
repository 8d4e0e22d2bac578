#include "nirisk/clinical/records.hpp"

#include "csv.hpp"
#include "nirisk/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

namespace nirisk::clinical {

namespace {

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

void check_header(std::istream& in, const std::vector<std::string>& expected, const std::filesystem::path& path) {
  std::string line;
  if (!csv::read_line(in, line)) throw FormatError(path.string() + ": empty file, expected header " + join(expected));
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  auto fields = csv::split(line);
  if (!fields || *fields != expected)
    throw FormatError(path.string() + ": header must be '" + join(expected) + "', got '" + line + "'");
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = parse_int(text.substr(0, 4));
  auto m = parse_int(text.substr(5, 2));
  auto d = parse_int(text.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

int PatientRecord::length_of_stay() const {
  return static_cast<int>((std::chrono::sys_days{exit} - std::chrono::sys_days{entry}).count());
}

int PatientRecord::stay_days() const { return length_of_stay() + 1; }

IngestResult ingest(const std::filesystem::path& fixed_file, const std::filesystem::path& daily_file,
                    const ClinicalSchema& schema) {
  IngestResult result;
  auto& report = result.report;
  auto drop = [&](std::string pid, std::string field, std::string reason) {
    ++report.rows_dropped;
    report.corrections.push_back({std::move(pid), std::move(field), std::move(reason)});
  };

  std::ifstream fin(fixed_file);
  if (!fin) throw IoError("cannot read " + fixed_file.string());
  const auto& header = fixed_file_header();
  check_header(fin, header, fixed_file);

  // Categorical columns the schema constrains.
  std::map<std::string, const pgm::Variable*> constrained;
  for (const auto& f : schema.fixed)
    if (f.derive.kind == Derivation::Kind::categorical) constrained[f.derive.source] = &f.variable;

  std::map<std::string, std::size_t> by_id;
  std::string line;
  while (csv::read_line(fin, line)) {
    if (blank(line)) continue;
    ++report.rows_read;
    auto fields = csv::split(line);
    if (!fields) {
      drop("", "", "unbalanced quote");
      continue;
    }
    if (fields->size() != header.size()) {
      drop(fields->empty() ? "" : (*fields)[0], "", "wrong field count");
      continue;
    }
    PatientRecord rec;
    rec.patient_id = (*fields)[0];
    if (rec.patient_id.empty()) {
      drop("", "patient_id", "missing patient_id");
      continue;
    }
    if (by_id.count(rec.patient_id)) {
      drop(rec.patient_id, "patient_id", "duplicate patient_id");
      continue;
    }
    std::optional<std::string> problem_field, problem;
    for (std::size_t c = 1; c < header.size(); ++c) {
      const auto& col = header[c];
      const auto& cell = (*fields)[c];
      if (cell.empty()) continue;
      rec.fixed[col] = cell;
      if (col == "age") {
        auto age = parse_number(cell);
        if (!age) {
          problem_field = col, problem = "unparseable value '" + cell + "'";
        } else if (*age < 0) {
          problem_field = col, problem = "negative age";
        }
      } else if (auto it = constrained.find(col); it != constrained.end() && !it->second->find_state(cell)) {
        problem_field = col, problem = "invalid state '" + cell + "'";
      }
      if (problem) break;
    }
    if (!problem) {
      auto entry = parse_date(rec.fixed.count("entry_date") ? rec.fixed["entry_date"] : "");
      auto exit = parse_date(rec.fixed.count("exit_date") ? rec.fixed["exit_date"] : "");
      if (!entry) {
        problem_field = "entry_date", problem = "unparseable date";
      } else if (!exit) {
        problem_field = "exit_date", problem = "unparseable date";
      } else if (std::chrono::sys_days{*exit} < std::chrono::sys_days{*entry}) {
        problem_field = "exit_date", problem = "exit before entry";
      } else {
        rec.entry = *entry;
        rec.exit = *exit;
      }
    }
    if (problem) {
      drop(rec.patient_id, *problem_field, *problem);
      continue;
    }
    rec.days.resize(static_cast<std::size_t>(rec.stay_days()));
    by_id.emplace(rec.patient_id, result.records.size());
    result.records.push_back(std::move(rec));
    ++report.rows_kept;
  }

  std::ifstream din(daily_file);
  if (!din) throw IoError("cannot read " + daily_file.string());
  check_header(din, daily_file_header(), daily_file);
  while (csv::read_line(din, line)) {
    if (blank(line)) continue;
    ++report.rows_read;
    auto fields = csv::split(line);
    if (!fields || fields->size() != 4) {
      drop(fields && !fields->empty() ? (*fields)[0] : "", "", "wrong field count");
      continue;
    }
    const auto& [pid, day_text, var, value] = std::tie((*fields)[0], (*fields)[1], (*fields)[2], (*fields)[3]);
    auto it = by_id.find(pid);
    if (it == by_id.end()) {
      drop(pid, "patient_id", "unknown patient");
      continue;
    }
    auto& rec = result.records[it->second];
    auto day = parse_int(day_text);
    if (!day) {
      drop(pid, "day", "unparseable value '" + day_text + "'");
      continue;
    }
    if (*day < 1 || *day > rec.stay_days()) {
      drop(pid, "day", "day out of stay range");
      continue;
    }
    const auto* tv = schema.find_temporal(var);
    if (!tv) {
      drop(pid, "variable", "unknown variable '" + var + "'");
      continue;
    }
    if (!tv->find_state(value)) {
      drop(pid, var, "invalid state '" + value + "'");
      continue;
    }
    auto& cells = rec.days[static_cast<std::size_t>(*day - 1)];
    if (cells.count(var)) {
      drop(pid, var, "duplicate observation");
      continue;
    }
    cells.emplace(var, value);
    ++report.rows_kept;
  }
  return result;
}

DiscreteRecord discretize(const PatientRecord& record, const ClinicalSchema& schema) {
  DiscreteRecord out;
  out.patient_id = record.patient_id;
  auto raw = [&](const std::string& col) -> std::optional<std::string> {
    auto it = record.fixed.find(col);
    if (it == record.fixed.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  for (const auto& f : schema.fixed) {
    const auto& var = f.variable;
    switch (f.derive.kind) {
      case Derivation::Kind::categorical: {
        auto cell = raw(f.derive.source);
        if (cell) out.fixed.emplace(var.name, var.states[var.state_index(*cell)]);
        break;
      }
      case Derivation::Kind::bins: {
        auto cell = raw(f.derive.source);
        if (!cell) break;
        auto value = parse_number(*cell);
        const int b = value ? bin_index(f.derive.edges, *value) : -1;
        if (b < 0) throw BinningError(var.name, *cell);
        out.fixed.emplace(var.name, var.states[b]);
        break;
      }
      case Derivation::Kind::season: {
        std::optional<Date> date;
        if (f.derive.source == "entry_date")
          date = record.entry;
        else if (f.derive.source == "exit_date")
          date = record.exit;
        else if (auto cell = raw(f.derive.source))
          date = parse_date(*cell);
        if (!date || !date->ok()) throw BinningError(var.name, raw(f.derive.source).value_or(""));
        const std::string season = season_of_month(static_cast<unsigned>(date->month()));
        out.fixed.emplace(var.name, var.states[var.state_index(season)]);
        break;
      }
      case Derivation::Kind::stay_length: {
        const int los = record.length_of_stay();
        const int b = bin_index(f.derive.edges, los);
        if (b < 0) throw BinningError(var.name, std::to_string(los));
        out.fixed.emplace(var.name, var.states[b]);
        break;
      }
    }
  }
  for (const auto& day : record.days) {
    pgm::Assignment a;
    for (const auto& [name, value] : day) {
      const auto* tv = schema.find_temporal(name);
      if (!tv) throw SchemaMismatch(name, "unknown temporal variable '" + name + "'");
      a.emplace(name, tv->states[tv->state_index(value)]);
    }
    out.days.push_back(std::move(a));
  }
  return out;
}

ClinicalData to_dataset(const std::vector<DiscreteRecord>& records, const ClinicalSchema& schema) {
  ClinicalData data;
  const auto statics = schema.fixed_variables();
  data.slices.static_rows = pgm::Dataset(statics);
  data.slices.slice_rows = pgm::Dataset(dbn::slice_columns(statics, schema.temporal));

  for (const auto& rec : records) {
    data.patient_ids.push_back(rec.patient_id);
    data.slices.static_rows.add_row(rec.fixed);

    std::optional<bool> ni_ever;
    if (auto it = rec.fixed.find(schema.result); it != rec.fixed.end()) ni_ever = it->second == "yes";

    const int n = static_cast<int>(rec.days.size());
    int first_yes = 0;
    for (int d = 1; d <= n && !first_yes; ++d) {
      auto it = rec.days[d - 1].find(schema.result_t);
      if (it != rec.days[d - 1].end() && it->second == "yes") first_yes = d;
    }
    std::vector<std::optional<bool>> labels(n);
    for (int d = 1; d <= n; ++d) {
      if (first_yes) {
        labels[d - 1] = d >= first_yes;
      } else if (ni_ever == false) {
        labels[d - 1] = false;
      } else if (auto it = rec.days[d - 1].find(schema.result_t); it != rec.days[d - 1].end()) {
        labels[d - 1] = false;
      }
    }
    std::optional<bool> stay;
    if (first_yes || ni_ever == true)
      stay = true;
    else if (ni_ever == false || (n > 0 && std::all_of(labels.begin(), labels.end(), [](auto l) { return l == false; })))
      stay = false;

    dbn::EvidenceTimeline tl;
    tl.static_evidence = rec.fixed;
    tl.static_evidence.erase(schema.result);

    std::vector<pgm::Assignment> labelled(n);
    for (int d = 1; d <= n; ++d) {
      labelled[d - 1] = rec.days[d - 1];
      labelled[d - 1].erase(schema.result_t);
      pgm::Assignment day_ev = labelled[d - 1];
      tl.days.push_back(std::move(day_ev));
      if (labels[d - 1]) labelled[d - 1][schema.result_t] = *labels[d - 1] ? "yes" : "no";
    }
    for (int d = 1; d <= n; ++d) {
      pgm::Assignment row = rec.fixed;
      row.insert(labelled[d - 1].begin(), labelled[d - 1].end());
      if (d >= 2)
        for (const auto& [name, label] : labelled[d - 2]) row.emplace(dbn::previous_token(name), label);
      data.slices.slice_rows.add_row(row);
      data.slices.slice_day.push_back(d);
    }

    data.timelines.push_back(std::move(tl));
    data.day_labels.push_back(std::move(labels));
    data.stay_labels.push_back(stay);
  }
  return data;
}

void write_fixed_file(const std::filesystem::path& path, const std::vector<PatientRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto& header = fixed_file_header();
  csv::write_row(out, header);
  for (const auto& rec : records) {
    std::vector<std::string> row{rec.patient_id};
    for (std::size_t c = 1; c < header.size(); ++c) {
      if (header[c] == "entry_date") {
        row.push_back(format_date(rec.entry));
      } else if (header[c] == "exit_date") {
        row.push_back(format_date(rec.exit));
      } else {
        auto it = rec.fixed.find(header[c]);
        row.push_back(it == rec.fixed.end() ? "" : it->second);
      }
    }
    csv::write_row(out, row);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_daily_file(const std::filesystem::path& path, const std::vector<PatientRecord>& records,
                      const ClinicalSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, daily_file_header());
  for (const auto& rec : records) {
    for (std::size_t d = 0; d < rec.days.size(); ++d) {
      const auto& cells = rec.days[d];
      std::set<std::string> written;
      auto emit = [&](const std::string& var, const std::string& value) {
        csv::write_row(out, {rec.patient_id, std::to_string(d + 1), var, value});
        written.insert(var);
      };
      for (const auto& v : schema.temporal)
        if (auto it = cells.find(v.name); it != cells.end()) emit(it->first, it->second);
      for (const auto& [var, value] : cells)
        if (!written.count(var)) emit(var, value);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace nirisk::clinical
