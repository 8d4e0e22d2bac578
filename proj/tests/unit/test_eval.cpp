#include <doctest.h>

#include "fixtures.hpp"

#include "nirisk/dbn/sampling.hpp"
#include "nirisk/errors.hpp"
#include "nirisk/eval/evaluate.hpp"
#include "nirisk/eval/metrics.hpp"
#include "nirisk/synth/cohort.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace nirisk;
using namespace nirisk::eval;
using namespace testing_support;

namespace {

// Patients drawn from a spec whose result node is "R", labelled from the
// sampled result.
clinical::ClinicalData sampled_data(const dbn::DbnSpec& spec, int n, int days, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  clinical::ClinicalData data;
  for (int i = 0; i < n; ++i) {
    auto tr = dbn::sample_trajectory(spec, days, rng);
    dbn::EvidenceTimeline tl{tr.statics, {}};
    std::vector<std::optional<bool>> labels;
    bool any = false;
    for (auto day : tr.days) {
      const bool yes = day.at("R") == "yes";
      any = any || yes;
      labels.push_back(yes);
      day.erase("R");
      tl.days.push_back(day);
    }
    data.patient_ids.push_back("p" + std::to_string(i));
    data.timelines.push_back(tl);
    data.day_labels.push_back(labels);
    data.stay_labels.push_back(any);
  }
  return data;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("threshold rule") {
    CHECK_FALSE(classify(0.0, 0.5));
    CHECK(classify(0.5, 0.5));
    CHECK(classify(0.74, 0.5));
    CHECK_FALSE(classify(0.4999999, 0.5));
    CHECK(classify(1.0, 1.0));
    CHECK(classify(0.0, 0.0));
  }

  TEST_CASE("out of range") {
    CHECK_THROWS_AS(classify(-0.01, 0.5), RangeError);
    CHECK_THROWS_AS(classify(1.01, 0.5), RangeError);
    CHECK_THROWS_AS(classify(0.5, 1.5), RangeError);
    CHECK_THROWS_AS(classify(std::nan(""), 0.5), RangeError);
  }
}

TEST_SUITE("confusion") {
  TEST_CASE("all correct negatives") {
    CHECK(confusion({false, false, false}, {false, false, false}) == ConfusionMatrix{3, 0, 0, 0});
  }

  TEST_CASE("identity has no errors") {
    std::vector<bool> v{true, false, true, true, false};
    auto m = confusion(v, v);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
    CHECK(m.tp == 3);
    CHECK(m.tn == 2);
  }

  TEST_CASE("58 cases assembled as 34/7/8/9") {
    std::vector<bool> predicted, actual;
    auto add = [&](int n, bool p, bool a) {
      for (int k = 0; k < n; ++k) {
        predicted.push_back(p);
        actual.push_back(a);
      }
    };
    add(34, false, false);
    add(7, true, false);
    add(8, false, true);
    add(9, true, true);
    CHECK(confusion(predicted, actual) == ConfusionMatrix{34, 7, 8, 9});

    std::mt19937_64 rng(5);
    std::vector<std::size_t> order(predicted.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int round = 0; round < 10; ++round) {
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<bool> p, a;
      for (auto i : order) {
        p.push_back(predicted[i]);
        a.push_back(actual[i]);
      }
      CHECK(confusion(p, a) == ConfusionMatrix{34, 7, 8, 9});
    }
  }

  TEST_CASE("length mismatch and empty input") {
    CHECK_THROWS_AS(confusion({true}, {true, false}), InputError);
    CHECK_THROWS_AS(confusion({}, {}), InputError);
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("the 34/7/8/9 matrix") {
    auto r = metrics({34, 7, 8, 9});
    CHECK(r.total == 58);
    CHECK(r.accuracy == doctest::Approx(43.0 / 58).epsilon(1e-15));
    CHECK(std::abs(r.accuracy - 0.741379) < 1e-6);
    CHECK(*r.ppv == 0.5625);
    CHECK(std::abs(*r.npv - 0.809524) < 1e-6);
    CHECK(two_decimals(r.accuracy) == "0.74");
    CHECK(two_decimals(*r.ppv) == "0.56");
    CHECK(two_decimals(*r.npv) == "0.81");
  }

  TEST_CASE("perfect and perfectly wrong") {
    auto good = metrics({1, 0, 0, 1});
    CHECK(good.accuracy == 1.0);
    CHECK(*good.ppv == 1.0);
    CHECK(*good.npv == 1.0);
    auto bad = metrics({0, 1, 1, 0});
    CHECK(bad.accuracy == 0.0);
    CHECK(*bad.ppv == 0.0);
    CHECK(*bad.npv == 0.0);
  }

  TEST_CASE("undefined predictive values are absent") {
    auto r = metrics({5, 0, 3, 0});
    CHECK_FALSE(r.ppv);
    CHECK(*r.npv == 5.0 / 8);
    auto j = metrics_to_json(r);
    CHECK(j.at("ppv").is_null());
    CHECK(j.at("rounded").at("ppv").is_null());
    CHECK_FALSE(metrics({0, 2, 0, 1}).npv);
  }

  TEST_CASE("empty or negative matrices") {
    CHECK_THROWS_AS(metrics({0, 0, 0, 0}), InputError);
    CHECK_THROWS_AS(metrics({-1, 2, 0, 0}), InputError);
  }

  TEST_CASE("scaling every count leaves the ratios unchanged") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> cell(0, 50);
    for (int round = 0; round < 200; ++round) {
      ConfusionMatrix m{cell(rng), cell(rng), cell(rng), cell(rng) + 1};
      auto base = metrics(m);
      for (int k : {2, 3, 17}) {
        auto scaled = metrics({m.tn * k, m.fp * k, m.fn * k, m.tp * k});
        CHECK(scaled.accuracy == doctest::Approx(base.accuracy).epsilon(1e-15));
        CHECK(scaled.ppv.has_value() == base.ppv.has_value());
        CHECK(scaled.npv.has_value() == base.npv.has_value());
        if (base.ppv) CHECK(*scaled.ppv == doctest::Approx(*base.ppv).epsilon(1e-15));
        if (base.npv) CHECK(*scaled.npv == doctest::Approx(*base.npv).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("raising the threshold never adds false positives or removes false negatives") {
    std::mt19937_64 rng(21);
    std::vector<double> p(300);
    std::vector<bool> actual(300);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::uniform_real_distribution<double>(0, 1)(rng);
      actual[i] = std::bernoulli_distribution(p[i])(rng);
    }
    ConfusionMatrix prev{};
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      std::vector<bool> predicted;
      for (double v : p) predicted.push_back(classify(v, t));
      auto m = confusion(predicted, actual);
      if (k) {
        CHECK(m.fp <= prev.fp);
        CHECK(m.fn >= prev.fn);
      }
      prev = m;
    }
  }

  TEST_CASE("serialization") {
    auto r = metrics({34, 7, 8, 9}, 0.5);
    auto j = metrics_to_json(r);
    CHECK(j.at("rounded").at("accuracy") == "0.74");
    CHECK(j.at("rounded").at("ppv") == "0.56");
    CHECK(j.at("rounded").at("npv") == "0.81");
    CHECK(j.at("threshold") == 0.5);
    CHECK(matrix_from_json(j.at("matrix")) == r.matrix);
    CHECK_THROWS_AS(matrix_from_json(pgm::json{{"tn", 1}}), FormatError);
    auto table = metrics_table(r);
    CHECK(table.find("0.741379") != std::string::npos);
    CHECK(table.find("0.56") != std::string::npos);
    CHECK(table.find("0.81") != std::string::npos);
    std::istringstream lines(table);
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(row1.size() == header.size());
    CHECK(row2.size() == header.size());
  }
}

TEST_SUITE("evaluate") {
  TEST_CASE("near-deterministic ground truth is easy") {
    auto spec = near_deterministic_spec();
    auto data = sampled_data(spec, 300, 4, 3);
    auto stay = evaluate_dataset(spec, data, 0.5, Horizon::per_stay);
    CHECK(stay.report.total == 300);
    CHECK(stay.report.accuracy > 0.95);
    auto day = evaluate_dataset(spec, data, 0.5, Horizon::per_day);
    CHECK(day.report.total == 1200);
    CHECK(day.report.accuracy > 0.95);
  }

  TEST_CASE("threshold 1 predicts nobody positive") {
    auto spec = bridged_spec();
    auto e = evaluate_dataset(spec, sampled_data(spec, 50, 3, 4), 1.0);
    CHECK(e.report.matrix.tp == 0);
    CHECK(e.report.matrix.fp == 0);
    CHECK_FALSE(e.report.ppv);
  }

  TEST_CASE("per-stay score is the highest daily risk") {
    auto spec = bridged_spec();
    auto data = sampled_data(spec, 20, 3, 6);
    auto e = evaluate_dataset(spec, data, 0.5);
    auto day = evaluate_dataset(spec, data, 0.5, Horizon::per_day);
    for (std::size_t i = 0; i < e.cases.size(); ++i) {
      double best = 0.0;
      for (const auto& c : day.cases)
        if (c.patient_id == e.cases[i].patient_id) best = std::max(best, c.probability);
      CHECK(e.cases[i].probability == best);
    }
  }

  TEST_CASE("58 synthetic test patients give 58 cases") {
    auto cfg = synth::default_config(58, 43);
    auto e = evaluate_model(cfg.ground_truth, synth::generate_cohort(cfg), cfg.schema);
    CHECK(e.report.total == 58);
    CHECK(e.unlabelled == 0);
  }

  TEST_CASE("unlabelled patients are skipped and an empty set is an error") {
    auto spec = bridged_spec();
    auto data = sampled_data(spec, 3, 2, 8);
    data.stay_labels[1].reset();
    data.day_labels[1] = {std::nullopt, std::nullopt};
    auto e = evaluate_dataset(spec, data);
    CHECK(e.report.total == 2);
    CHECK(e.unlabelled == 1);
    CHECK(evaluate_dataset(spec, data, 0.5, Horizon::per_day).unlabelled == 2);
    CHECK_THROWS_AS(evaluate_dataset(spec, clinical::ClinicalData{}), InputError);
    CHECK_THROWS_AS(evaluate_dataset(spec, data, 2.0), RangeError);
  }

  TEST_CASE("histogram") {
    std::vector<Case> cases{{"a", 0, 0.05, false, false}, {"b", 0, 0.55, true, true}, {"c", 0, 1.0, true, false}};
    auto csv = histogram_csv(cases, 0.5);
    CHECK(csv.starts_with("lower,upper,cases,predicted_yes,observed_yes\n0.0,0.1,1,0,0\n"));
    CHECK(csv.find("0.5,0.6,1,1,1\n") != std::string::npos);
    CHECK(csv.ends_with("0.9,1.0,1,1,0\n"));
    CHECK(parse_horizon("per-day") == Horizon::per_day);
    CHECK_THROWS_AS(parse_horizon("weekly"), InputError);
  }
}
