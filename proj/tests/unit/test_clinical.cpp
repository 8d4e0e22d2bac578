#include <doctest.h>

#include "nirisk/clinical/model.hpp"
#include "nirisk/clinical/records.hpp"
#include "nirisk/clinical/schema.hpp"
#include "nirisk/dbn/inference.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/synth/cohort.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

using namespace nirisk;
using namespace nirisk::clinical;
namespace fs = std::filesystem;

namespace {

const char* kFixedHeader = "patient_id,sex,age,entry_date,exit_date,orig,detorig,priseAnti,knaus,diag,ant,cissue,ni_ever\n";
const char* kDailyHeader = "patient_id,day,variable,value\n";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("nirisk_clinical_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path / file, std::ios::binary) << text;
    return path / file;
  }
};

PatientRecord raw_patient(const std::string& age, const std::string& entry, const std::string& exit) {
  PatientRecord r;
  r.patient_id = "p";
  r.fixed = {{"sex", "F"}, {"age", age}, {"orig", "home"}, {"detorig", "surgery"}, {"priseAnti", "no"},
             {"knaus", "B"}, {"diag", "medical"}, {"ant", "no"}, {"cissue", "survived"}, {"ni_ever", "no"}};
  r.entry = *parse_date(entry);
  r.exit = *parse_date(exit);
  r.days.resize(static_cast<std::size_t>(r.stay_days()));
  return r;
}

bool cites(const CleaningReport& report, const std::string& reason) {
  return std::any_of(report.corrections.begin(), report.corrections.end(),
                     [&](const Correction& c) { return c.reason.find(reason) != std::string::npos; });
}

}  // namespace

TEST_SUITE("schema") {
  TEST_CASE("built-in variables") {
    auto s = default_schema();
    std::vector<std::string> fixed;
    for (const auto& f : s.fixed) fixed.push_back(f.variable.name);
    CHECK(fixed == std::vector<std::string>{"sex", "age1", "periode_entr", "orig", "detorig", "priseAnti", "knaus",
                                            "cissue", "diag", "ant", "dsj", "result"});
    CHECK(s.find_fixed("result")->variable.states == std::vector<std::string>{"yes", "no"});
    CHECK(s.find_temporal("result_t")->states == std::vector<std::string>{"yes", "no"});
    CHECK(s.temporal.size() == 42);
    int acts = 0, exams = 0;
    for (const auto& v : s.temporal) {
      acts += v.name.starts_with("act_");
      exams += v.name.starts_with("examinf_");
    }
    CHECK(acts == 10);
    CHECK(exams == 30);
    CHECK(s.find_temporal("act_10"));
    CHECK(s.find_temporal("examinf_30"));
    CHECK_FALSE(s.find_temporal("cissue_t"));
    CHECK(default_schema(true).find_temporal("cissue_t"));
  }

  TEST_CASE("json round trip") {
    auto s = default_schema(true);
    auto back = schema_from_json(schema_to_json(s));
    CHECK(schema_to_json(back) == schema_to_json(s));
    CHECK(back.find_fixed("age1")->derive.edges == std::vector<double>{0, 16, 41, 66});
    CHECK(back.find_fixed("dsj")->derive.kind == Derivation::Kind::stay_length);
  }

  TEST_CASE("malformed schema files") {
    auto j = schema_to_json(default_schema());
    auto bad_edges = j;
    for (auto& f : bad_edges["fixed_variables"])
      if (f["name"] == "age1") f["derive"]["edges"] = {0, 41, 16, 66};
    CHECK_THROWS_AS(schema_from_json(bad_edges), FormatError);
    auto bad_kind = j;
    bad_kind["fixed_variables"][0]["derive"]["kind"] = "guess";
    CHECK_THROWS_AS(schema_from_json(bad_kind), FormatError);
    auto no_result = j;
    no_result["result"] = "nothing";
    CHECK_THROWS_AS(schema_from_json(no_result), FormatError);
    CHECK_THROWS_AS(schema_from_json(pgm::json::array()), FormatError);
  }

  TEST_CASE("bins are half-open") {
    const std::vector<double> edges{0, 16, 41, 66};
    CHECK(bin_index(edges, -0.5) == -1);
    CHECK(bin_index(edges, 0) == 0);
    CHECK(bin_index(edges, 15.999) == 0);
    CHECK(bin_index(edges, 16) == 1);
    CHECK(bin_index(edges, 40.9) == 1);
    CHECK(bin_index(edges, 41) == 2);
    CHECK(bin_index(edges, 66) == 3);
    CHECK(bin_index(edges, 120) == 3);
  }

  TEST_CASE("seasons") {
    const char* expected[] = {"winter", "winter", "spring", "spring", "spring", "summer",
                              "summer", "summer", "autumn", "autumn", "autumn", "winter"};
    for (unsigned m = 1; m <= 12; ++m) CHECK(std::string(season_of_month(m)) == expected[m - 1]);
  }
}

TEST_SUITE("dates") {
  TEST_CASE("strict ISO dates") {
    CHECK(parse_date("2021-02-28"));
    CHECK(parse_date("2024-02-29"));
    CHECK_FALSE(parse_date("2021-02-29"));
    CHECK_FALSE(parse_date("2021-2-28"));
    CHECK_FALSE(parse_date("28/02/2021"));
    CHECK_FALSE(parse_date("2021-13-01"));
    CHECK_FALSE(parse_date(""));
    CHECK(format_date(*parse_date("2021-03-04")) == "2021-03-04");
  }

  TEST_CASE("stay arithmetic") {
    auto r = raw_patient("30", "2021-01-30", "2021-02-02");
    CHECK(r.length_of_stay() == 3);
    CHECK(r.stay_days() == 4);
  }
}

TEST_SUITE("ingest") {
  TEST_CASE("empty daily file keeps fixed data and drops nothing") {
    TempDir dir("empty_daily");
    auto fixed = dir.write("fixed.csv", std::string(kFixedHeader) +
                                            "p1,M,70,2021-01-01,2021-01-04,home,emergency,yes,C,medical,no,survived,no\n"
                                            "p2,F,12,2021-06-10,2021-06-10,ward,surgery,no,A,surgical,yes,dead,\n");
    auto daily = dir.write("daily.csv", kDailyHeader);
    auto res = ingest(fixed, daily, default_schema());
    REQUIRE(res.records.size() == 2);
    CHECK(res.report.rows_dropped == 0);
    CHECK(res.report.rows_read == 2);
    CHECK(res.records[0].days.size() == 4);
    CHECK(res.records[1].days.size() == 1);
    CHECK_FALSE(res.records[1].fixed.count("ni_ever"));
  }

  TEST_CASE("daily rows outside the stay and other bad rows are dropped with a reason") {
    TempDir dir("bad_daily");
    auto fixed = dir.write("fixed.csv", std::string(kFixedHeader) +
                                            "p1,M,70,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n");
    auto daily = dir.write("daily.csv", std::string(kDailyHeader) +
                                            "p1,1,act_1,yes\n"
                                            "p1,4,act_1,yes\n"
                                            "p1,0,act_1,yes\n"
                                            "p9,1,act_1,yes\n"
                                            "p1,x,act_1,yes\n"
                                            "p1,2,act_99,yes\n"
                                            "p1,2,sens,maybe\n"
                                            "p1,1,act_1,no\n"
                                            "p1,2,sens,resistant\n"
                                            "p1,3\n");
    auto res = ingest(fixed, daily, default_schema());
    const auto& rep = res.report;
    CHECK(rep.rows_read == 11);
    CHECK(rep.rows_kept == 3);
    CHECK(rep.rows_dropped == 8);
    CHECK(rep.rows_read == rep.rows_kept + rep.rows_dropped);
    CHECK(cites(rep, "day out of stay range"));
    CHECK(cites(rep, "unknown patient"));
    CHECK(cites(rep, "unknown variable"));
    CHECK(cites(rep, "invalid state"));
    CHECK(cites(rep, "duplicate observation"));
    CHECK(cites(rep, "unparseable value"));
    CHECK(cites(rep, "wrong field count"));
    const auto& days = res.records.at(0).days;
    CHECK(days[0].at("act_1") == "yes");
    CHECK(days[1].at("sens") == "resistant");
    CHECK(days[2].empty());
  }

  TEST_CASE("bad fixed rows are dropped, never coerced") {
    TempDir dir("bad_fixed");
    auto fixed = dir.write("fixed.csv",
                           std::string(kFixedHeader) +
                               "p1,M,70,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p2,M,-3,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p3,M,abc,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p4,M,40,2021-01-05,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p5,M,40,2021-02-30,2021-03-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p6,X,40,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p1,F,40,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p7,F,40,2021-01-01,2021-01-03,home\n"
                               ",F,40,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,no\n"
                               "p8,F,40,2021-01-01,2021-01-03,home,emergency,yes,C,medical,no,survived,perhaps\n"
                               "\"p9\",\"F\",40,2021-01-01,2021-01-01,home,emergency,yes,C,medical,no,survived,yes\r\n");
    auto daily = dir.write("daily.csv", kDailyHeader);
    auto res = ingest(fixed, daily, default_schema());
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].patient_id == "p1");
    CHECK(res.records[0].fixed.at("sex") == "M");
    CHECK(res.records[1].patient_id == "p9");
    CHECK(res.report.rows_dropped == 9);
    CHECK(cites(res.report, "negative age"));
    CHECK(cites(res.report, "exit before entry"));
    CHECK(cites(res.report, "unparseable date"));
    CHECK(cites(res.report, "invalid state 'X'"));
    CHECK(cites(res.report, "duplicate patient_id"));
    CHECK(cites(res.report, "wrong field count"));
    CHECK(cites(res.report, "missing patient_id"));
    CHECK(cites(res.report, "invalid state 'perhaps'"));
  }

  TEST_CASE("header and file errors") {
    TempDir dir("headers");
    auto good = dir.write("fixed.csv", kFixedHeader);
    auto daily = dir.write("daily.csv", kDailyHeader);
    auto bad = dir.write("bad.csv", "patient_id,sex\n");
    auto empty = dir.write("empty.csv", "");
    auto bom = dir.write("bom.csv", std::string("\xEF\xBB\xBF") + kDailyHeader);
    CHECK_THROWS_AS(ingest(bad, daily, default_schema()), FormatError);
    CHECK_THROWS_AS(ingest(good, bad, default_schema()), FormatError);
    CHECK_THROWS_AS(ingest(empty, daily, default_schema()), FormatError);
    CHECK_THROWS_AS(ingest(dir.path / "absent.csv", daily, default_schema()), IoError);
    CHECK_THROWS_AS(ingest(good, dir.path / "absent.csv", default_schema()), IoError);
    CHECK_NOTHROW(ingest(good, bom, default_schema()));
  }

  TEST_CASE("a 280-patient training file gives 280 records") {
    TempDir dir("cohort");
    auto cfg = synth::default_config(280, 42);
    auto files = synth::write_cohort(dir.path, cfg, synth::generate_cohort(cfg));
    auto res = ingest(files.fixed, files.daily, cfg.schema);
    CHECK(res.records.size() == 280);
    CHECK(res.report.rows_dropped == 0);
  }
}

TEST_SUITE("discretize") {
  TEST_CASE("age 0 is in the lowest bin") {
    auto d = discretize(raw_patient("0", "2021-05-01", "2021-05-03"), default_schema());
    CHECK(d.fixed.at("age1") == "0-15");
  }

  TEST_CASE("same-day exit gives a zero-length stay") {
    auto d = discretize(raw_patient("30", "2021-05-01", "2021-05-01"), default_schema());
    CHECK(d.fixed.at("dsj") == "0-2d");
    CHECK(d.days.size() == 1);
  }

  TEST_CASE("values on an edge go to the higher bin") {
    const std::pair<const char*, const char*> ages[] = {{"15", "0-15"},  {"15.5", "0-15"}, {"16", "16-40"},
                                                        {"40", "16-40"}, {"41", "41-65"},  {"65", "41-65"},
                                                        {"66", "66+"},   {"101", "66+"}};
    for (const auto& [age, state] : ages)
      CHECK(discretize(raw_patient(age, "2021-05-01", "2021-05-02"), default_schema()).fixed.at("age1") == state);
    const std::pair<const char*, const char*> stays[] = {{"2021-05-03", "0-2d"},  {"2021-05-04", "3-7d"},
                                                         {"2021-05-08", "3-7d"},  {"2021-05-09", "8-14d"},
                                                         {"2021-05-15", "8-14d"}, {"2021-05-16", "15d+"}};
    for (const auto& [exit, state] : stays)
      CHECK(discretize(raw_patient("30", "2021-05-01", exit), default_schema()).fixed.at("dsj") == state);
  }

  TEST_CASE("season, result and categorical fields") {
    auto r = raw_patient("30", "2021-12-31", "2022-01-02");
    r.fixed["ni_ever"] = "yes";
    auto d = discretize(r, default_schema());
    CHECK(d.fixed.at("periode_entr") == "winter");
    CHECK(d.fixed.at("result") == "yes");
    CHECK(d.fixed.at("knaus") == "B");
    CHECK(d.fixed.size() == 12);
  }

  TEST_CASE("missing cells stay unbound") {
    auto r = raw_patient("30", "2021-05-01", "2021-05-02");
    r.fixed.erase("age");
    r.fixed.erase("ni_ever");
    auto d = discretize(r, default_schema());
    CHECK_FALSE(d.fixed.count("age1"));
    CHECK_FALSE(d.fixed.count("result"));
  }

  TEST_CASE("values outside every bin name the variable and value") {
    try {
      discretize(raw_patient("-1", "2021-05-01", "2021-05-02"), default_schema());
      FAIL("expected a binning error");
    } catch (const BinningError& e) {
      CHECK(e.variable() == "age1");
      CHECK(e.value() == "-1");
    }
    CHECK_THROWS_AS(discretize(raw_patient("old", "2021-05-01", "2021-05-02"), default_schema()), BinningError);
  }

  TEST_CASE("undeclared labels are a schema mismatch") {
    auto r = raw_patient("30", "2021-05-01", "2021-05-02");
    r.fixed["knaus"] = "Z";
    CHECK_THROWS_AS(discretize(r, default_schema()), SchemaMismatch);
    auto t = raw_patient("30", "2021-05-01", "2021-05-02");
    t.days[0]["act_1"] = "perhaps";
    CHECK_THROWS_AS(discretize(t, default_schema()), SchemaMismatch);
  }

  TEST_CASE("pure and closed over the schema") {
    auto cfg = synth::default_config(40, 5);
    auto schema = cfg.schema;
    for (const auto& rec : synth::generate_cohort(cfg)) {
      auto a = discretize(rec, schema);
      auto b = discretize(rec, schema);
      CHECK(a.fixed == b.fixed);
      CHECK(a.days == b.days);
      for (const auto& [name, state] : a.fixed) CHECK(schema.find_fixed(name)->variable.find_state(state));
      for (const auto& day : a.days)
        for (const auto& [name, state] : day) CHECK(schema.find_temporal(name)->find_state(state));
    }
  }
}

TEST_SUITE("to_dataset") {
  DiscreteRecord three_days(std::optional<int> infected_on) {
    DiscreteRecord r;
    r.patient_id = "p";
    r.fixed = {{"sex", "M"}, {"result", infected_on ? "yes" : "no"}};
    r.days.resize(3);
    for (int d = 0; d < 3; ++d) {
      r.days[d]["act_1"] = d % 2 ? "yes" : "no";
      if (infected_on && d + 1 == *infected_on) r.days[d]["result_t"] = "yes";
    }
    return r;
  }

  TEST_CASE("one patient over three days") {
    auto data = to_dataset({three_days(std::nullopt)}, default_schema());
    CHECK(data.slices.static_rows.rows() == 1);
    CHECK(data.slices.slice_rows.rows() == 3);
    CHECK(data.slices.slice_day == std::vector<int>{1, 2, 3});
    REQUIRE(data.timelines.size() == 1);
    CHECK(data.timelines[0].days.size() == 3);
    CHECK(data.stay_labels[0] == false);
  }

  TEST_CASE("infection on day 2 labels day 2 onward") {
    auto schema = default_schema();
    auto data = to_dataset({three_days(2)}, schema);
    const auto& labels = data.day_labels[0];
    CHECK(labels == std::vector<std::optional<bool>>{false, true, true});
    CHECK(data.stay_labels[0] == true);
    const auto& rows = data.slices.slice_rows;
    const int col = *rows.column("result_t");
    const int lag = *rows.column("result_t[t-1]");
    CHECK(rows.code(0, col) == 1);
    CHECK(rows.code(1, col) == 0);
    CHECK(rows.code(2, col) == 0);
    CHECK(rows.code(0, lag) == -1);
    CHECK(rows.code(1, lag) == 1);
    CHECK(rows.code(2, lag) == 0);
  }

  TEST_CASE("timelines leave the result nodes unbound") {
    auto data = to_dataset({three_days(1)}, default_schema());
    const auto& tl = data.timelines[0];
    CHECK_FALSE(tl.static_evidence.count("result"));
    CHECK(tl.static_evidence.at("sex") == "M");
    for (const auto& day : tl.days) CHECK_FALSE(day.count("result_t"));
    CHECK_NOTHROW(dbn::predict_trajectory(
        ground_truth_spec(default_schema(), uniform_stay_weights(3, 10)), tl));
  }

  TEST_CASE("unknown outcome stays missing") {
    DiscreteRecord r;
    r.patient_id = "q";
    r.days.resize(2);
    r.days[1]["result_t"] = "no";
    auto data = to_dataset({r}, default_schema());
    CHECK(data.day_labels[0] == std::vector<std::optional<bool>>{std::nullopt, false});
    CHECK_FALSE(data.stay_labels[0].has_value());
  }

  TEST_CASE("day count is conserved through ingestion") {
    auto cfg = synth::default_config(25, 3);
    auto records = synth::generate_cohort(cfg);
    std::vector<DiscreteRecord> discrete;
    for (const auto& r : records) discrete.push_back(discretize(r, cfg.schema));
    auto data = to_dataset(discrete, cfg.schema);
    std::size_t total = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(data.timelines[i].days.size() == static_cast<std::size_t>(records[i].stay_days()));
      total += records[i].days.size();
    }
    CHECK(static_cast<std::size_t>(data.slices.slice_rows.rows()) == total);
  }
}

TEST_SUITE("built-in model") {
  TEST_CASE("structure") {
    auto schema = default_schema();
    auto spec = default_structure(schema);
    const auto& s = spec.static_slice();
    CHECK(s.cpt(s.index("result")).parents.empty());
    for (const char* v : {"sex", "age1", "periode_entr", "orig", "knaus", "diag", "dsj"})
      CHECK(s.cpt(s.index(v)).parents == std::vector<std::string>{"result"});
    CHECK(s.cpt(s.index("detorig")).parents == std::vector<std::string>{"orig"});
    CHECK(s.cpt(s.index("cissue")).parents == std::vector<std::string>{"age1"});
    CHECK(s.cpt(s.index("ant")).parents == std::vector<std::string>{"age1", "result"});
    CHECK(s.cpt(s.index("priseAnti")).parents == std::vector<std::string>{"age1", "result"});
    CHECK(spec.bridge_arcs() == std::vector<dbn::Arc>{{"result", "result_t"}});
    CHECK(spec.static_result_node() == "result");
    CHECK(spec.result_node() == "result_t");
  }

  TEST_CASE("ground truth tables") {
    auto spec = ground_truth_spec(default_schema(), uniform_stay_weights(3, 10));
    REQUIRE(spec.valid());
    const auto& s = spec.static_slice();
    // stays of 3..10 days last 2..9 whole days
    Eigen::RowVector4d dsj(1.0 / 8, 5.0 / 8, 2.0 / 8, 0.0);
    CHECK((s.cpt(s.index("dsj")).table.row(0) - dsj).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((s.cpt(s.index("dsj")).table.row(1) - dsj).cwiseAbs().maxCoeff() < 1e-15);
    const int r = *spec.find_temporal("result_t");
    CHECK(spec.cpt(r).table(0, 0) == 1.0);
    CHECK(spec.cpt(r).table(1, 0) == 1.0);
    CHECK(spec.cpt(r, true).table(0, 0) == 0.35);
  }

  TEST_CASE("stay bin distribution") {
    auto d = stay_bin_distribution(default_schema().find_fixed("dsj")->derive, uniform_stay_weights(1, 1));
    CHECK(d(0) == 1.0);
    CHECK_THROWS_AS(uniform_stay_weights(0, 3), InputError);
    CHECK_THROWS_AS(uniform_stay_weights(4, 3), InputError);
  }
}
