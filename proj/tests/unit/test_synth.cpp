#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

#include "nirisk/clinical/model.hpp"
#include "nirisk/dbn/examples.hpp"
#include "nirisk/dbn/inference.hpp"
#include "nirisk/dbn/learning.hpp"
#include "nirisk/dbn/sampling.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/pgm/io.hpp"
#include "nirisk/synth/cohort.hpp"
#include "nirisk/synth/recovery.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace nirisk;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nirisk_synth_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<dbn::Trajectory> trajectories(const dbn::DbnSpec& spec, int n, int days, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<dbn::Trajectory> out;
  for (int i = 0; i < n; ++i) out.push_back(dbn::sample_trajectory(spec, days, rng));
  return out;
}

}  // namespace

TEST_SUITE("cohort") {
  TEST_CASE("one patient with a one-day stay") {
    auto cfg = synth::default_config(1, 9, 1, 1);
    auto records = synth::generate_cohort(cfg);
    REQUIRE(records.size() == 1);
    CHECK(records[0].patient_id == "P1");
    CHECK(records[0].days.size() == 1);
    CHECK(records[0].entry == records[0].exit);
    auto d = clinical::discretize(records[0], cfg.schema);
    CHECK(d.fixed.at("dsj") == "0-2d");
    CHECK(d.days[0].size() == cfg.schema.temporal.size());
  }

  TEST_CASE("same seed gives byte-identical files") {
    auto cfg = synth::default_config(30, 17);
    auto a = synth::write_cohort(fresh_dir("a"), cfg, synth::generate_cohort(cfg));
    auto b = synth::write_cohort(fresh_dir("b"), cfg, synth::generate_cohort(cfg));
    CHECK(slurp(a.fixed) == slurp(b.fixed));
    CHECK(slurp(a.daily) == slurp(b.daily));
    CHECK(slurp(a.manifest) == slurp(b.manifest));
    auto other = synth::default_config(30, 18);
    auto c = synth::write_cohort(fresh_dir("c"), other, synth::generate_cohort(other));
    CHECK(slurp(a.daily) != slurp(c.daily));
    auto manifest = pgm::read_json_file(a.manifest);
    CHECK(manifest.at("seed") == 17);
    CHECK(manifest.at("n_patients") == 30);
    for (const char* d : {"a", "b", "c"}) fs::remove_all(fresh_dir(d));
  }

  TEST_CASE("patient draws do not depend on cohort size") {
    auto small = synth::sample_cohort(synth::default_config(5, 4));
    auto large = synth::sample_cohort(synth::default_config(50, 4));
    for (std::size_t i = 0; i < small.size(); ++i) {
      CHECK(small[i].fixed == large[i].fixed);
      CHECK(small[i].days == large[i].days);
    }
  }

  TEST_CASE("stays respect the weights and the sampled stay bin") {
    auto cfg = synth::default_config(200, 8);
    for (const auto& r : synth::generate_cohort(cfg)) {
      CHECK(r.stay_days() >= 3);
      CHECK(r.stay_days() <= 10);
    }
    auto short_stays = synth::default_config(5, 1, 1, 1);
    short_stays.stay_weights = {0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(synth::generate_cohort(short_stays), InputError);
  }

  TEST_CASE("day-1 infection rate over 280 patients") {
    auto cfg = synth::default_config(280, 42);
    const auto& spec = cfg.ground_truth;
    // P(result_1 = yes) read straight off the tables
    const auto& st = spec.static_slice();
    const auto& prior = st.cpt(st.index("result")).table;
    const auto& initial = spec.cpt(*spec.find_temporal("result_t"), true).table;
    const double expected = prior(0, 0) * initial(0, 0) + prior(0, 1) * initial(1, 0);
    CHECK(expected == doctest::Approx(0.14).epsilon(1e-12));
    int yes = 0;
    for (const auto& r : synth::generate_cohort(cfg)) yes += r.days.at(0).at("result_t") == "yes";
    CHECK(std::abs(yes / 280.0 - expected) <= 0.03);
  }

  TEST_CASE("re-ingesting the written files drops nothing") {
    auto cfg = synth::default_config(60, 23);
    auto records = synth::generate_cohort(cfg);
    auto dir = fresh_dir("reingest");
    auto files = synth::write_cohort(dir, cfg, records);
    auto res = clinical::ingest(files.fixed, files.daily, cfg.schema);
    CHECK(res.report.rows_dropped == 0);
    REQUIRE(res.records.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(res.records[i].patient_id == records[i].patient_id);
      CHECK(res.records[i].fixed == records[i].fixed);
      CHECK(res.records[i].days == records[i].days);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("discretized records reproduce the sampled states") {
    auto cfg = synth::default_config(40, 31);
    auto sampled = synth::sample_cohort(cfg);
    auto records = synth::generate_cohort(cfg);
    for (std::size_t i = 0; i < records.size(); ++i) {
      auto d = clinical::discretize(records[i], cfg.schema);
      CHECK(d.fixed == sampled[i].fixed);
      CHECK(d.days == sampled[i].days);
    }
  }

  TEST_CASE("configuration errors") {
    auto cfg = synth::default_config(3, 1);
    cfg.n_patients = 0;
    CHECK_THROWS_AS(synth::generate_cohort(cfg), InputError);
    cfg = synth::default_config(3, 1);
    cfg.stay_weights = {};
    CHECK_THROWS_AS(synth::generate_cohort(cfg), InputError);
    cfg.stay_weights = {0.0, -1.0};
    CHECK_THROWS_AS(synth::generate_cohort(cfg), InputError);
    cfg = synth::default_config(3, 1);
    cfg.schema = clinical::default_schema(true);
    CHECK_THROWS_AS(synth::generate_cohort(cfg), SchemaMismatch);
  }
}

TEST_SUITE("trajectory sampling") {
  TEST_CASE("empirical joint over two days matches the unrolled network") {
    auto spec = bridged_spec();
    auto net = dbn::unroll(spec, 2);
    const int n = 200000;
    std::map<std::vector<int>, int> counts;
    for (const auto& tr : trajectories(spec, n, 2, 77)) {
      pgm::Assignment a = tr.statics;
      for (int d = 0; d < 2; ++d)
        for (const auto& [name, state] : tr.days[d]) a.emplace(dbn::slice_name(name, d + 1), state);
      ++counts[net.encode(a)];
    }
    std::vector<int> cards;
    for (const auto& v : net.variables()) cards.push_back(v.cardinality());
    const auto cells = pgm::row_count(cards);
    double chi2 = 0.0;
    for (Eigen::Index c = 0; c < cells; ++c) {
      auto states = pgm::row_configuration(c, cards);
      const double expected = n * oracle::joint(net, states);
      auto it = counts.find(states);
      const double seen = it == counts.end() ? 0.0 : it->second;
      chi2 += (seen - expected) * (seen - expected) / expected;
    }
    // 0.999 quantile of chi-square by the Wilson-Hilferty approximation
    const double k = static_cast<double>(cells - 1);
    const double q = k * std::pow(1 - 2 / (9 * k) + 3.0902 * std::sqrt(2 / (9 * k)), 3);
    CHECK(cells == 108);
    CHECK(chi2 < q);
  }

  TEST_CASE("slice rows carry the previous day") {
    auto spec = bridged_spec();
    auto data = dbn::slice_data(spec, trajectories(spec, 3, 4, 5));
    CHECK(data.static_rows.rows() == 3);
    CHECK(data.slice_rows.rows() == 12);
    const int r = *data.slice_rows.column("R");
    const int lag = *data.slice_rows.column("R[t-1]");
    for (Eigen::Index row = 0; row < 12; ++row) {
      if (data.slice_day[row] == 1)
        CHECK(data.slice_rows.code(row, lag) == -1);
      else
        CHECK(data.slice_rows.code(row, lag) == data.slice_rows.code(row - 1, r));
    }
  }
}

TEST_SUITE("recovery") {
  TEST_CASE("identical specs are at distance zero") {
    auto spec = bridged_spec();
    auto rep = synth::recovery_report(spec, spec);
    // S: 1 row, R: 6, R (day 1): 3, O: 2
    CHECK(rep.rows.size() == 12);
    CHECK(rep.max_l1 == 0.0);
    CHECK(rep.mean_l1 == 0.0);
  }

  TEST_CASE("swapping a 0.7/0.3 row costs 0.8") {
    auto spec = bridged_spec();
    auto t = spec.slice();
    t.cpts[0].table.row(2) = Eigen::RowVector2d(0.3, 0.7);
    auto changed = spec.with_tables(spec.static_slice(), t);
    auto rep = synth::recovery_report(spec, changed);
    CHECK(rep.max_l1 == doctest::Approx(0.8).epsilon(1e-12));
    int nonzero = 0;
    for (const auto& row : rep.rows) {
      if (row.l1 == 0.0) continue;
      ++nonzero;
      CHECK(row.table == "R");
      CHECK(row.given == "R[t-1]=yes,S=c");
    }
    CHECK(nonzero == 1);
    auto j = synth::recovery_to_json(rep);
    CHECK(j.at("rows").size() == 12);
    CHECK(j.at("max_l1").get<double>() == doctest::Approx(0.8));
  }

  TEST_CASE("different structures cannot be compared") {
    CHECK_THROWS_AS(synth::recovery_report(bridged_spec(), dbn::chain_spec()), ComparisonError);
    auto cfg = synth::default_config(1, 1);
    auto other = clinical::default_structure(clinical::default_schema(true));
    CHECK_THROWS_AS(synth::recovery_report(cfg.ground_truth, other), ComparisonError);
  }

  TEST_CASE("50k sampled slices recover every row within L1 0.05") {
    auto spec = bridged_spec();
    auto data = dbn::slice_data(spec, trajectories(spec, 10000, 5, 2024));
    REQUIRE(data.slice_rows.rows() == 50000);
    auto fit = dbn::fit_dbn(spec.with_uniform_tables(), data, 1.0);
    auto rep = synth::recovery_report(spec, fit.spec);
    CHECK(rep.max_l1 < 0.05);
  }

  TEST_CASE("clinical ground truth refits from its own cohort") {
    auto cfg = synth::default_config(300, 12);
    std::vector<clinical::DiscreteRecord> discrete;
    for (const auto& r : synth::generate_cohort(cfg)) discrete.push_back(clinical::discretize(r, cfg.schema));
    auto data = clinical::to_dataset(discrete, cfg.schema);
    auto fit = dbn::fit_dbn(clinical::default_structure(cfg.schema), data.slices, 1.0);
    REQUIRE(fit.spec.valid());
    auto rep = synth::recovery_report(cfg.ground_truth, fit.spec);
    CHECK(rep.mean_l1 < 0.2);
  }
}
