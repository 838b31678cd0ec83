#include <doctest.h>

#include <cmath>

#include "clustsig/errors.hpp"
#include "clustsig/sim.hpp"

using namespace clustsig;

namespace {

TrialRecord fake_record(double p, bool null_true, Method m = Method::exact_k2) {
  TrialRecord rec;
  rec.null_true = null_true;
  MethodResult res;
  res.method = m;
  res.ok = true;
  res.report.p = p;
  rec.results.push_back(res);
  return rec;
}

}  // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("null_holds on label patterns") {
  auto part = make_partition({0, 0, 1, 1, 2, 2});
  TrueLabels same{{0, 0, 0, 0, 0, 0}};
  CHECK(null_holds(same, part, 0, 1));
  CHECK(null_holds(same, part, 1, 2));

  TrueLabels split{{0, 0, 1, 1, 1, 1}};
  CHECK(!null_holds(split, part, 0, 1));   // pair spans both components
  CHECK(null_holds(split, part, 1, 2));    // clusters 1,2 all from component 1

  TrueLabels mixed{{0, 1, 0, 0, 1, 1}};
  CHECK(!null_holds(mixed, part, 0, 1));   // cluster 0 itself mixes components
}

TEST_CASE("null_holds_means treats equal-mean components as one") {
  auto part = make_partition({0, 0, 1, 1});
  TrueLabels labels{{0, 0, 1, 1}};
  std::vector<Eigen::VectorXd> same_means = {Eigen::Vector2d(0, 0),
                                             Eigen::Vector2d(0, 0)};
  std::vector<Eigen::VectorXd> diff_means = {Eigen::Vector2d(0, 0),
                                             Eigen::Vector2d(3, 0)};
  CHECK(null_holds_means(labels, same_means, part, 0, 1));
  CHECK(!null_holds_means(labels, diff_means, part, 0, 1));
}

TEST_CASE("empirical_power arithmetic") {
  std::vector<TrialRecord> recs;
  recs.push_back(fake_record(0.01, false));
  recs.push_back(fake_record(0.20, false));
  CHECK(empirical_power(recs, Method::exact_k2, 0.05) == doctest::Approx(0.5));

  std::vector<TrialRecord> none_reject;
  none_reject.push_back(fake_record(0.5, false));
  none_reject.push_back(fake_record(0.9, false));
  CHECK(empirical_power(none_reject, Method::exact_k2, 0.05) == 0.0);

  std::vector<TrialRecord> all_null;
  all_null.push_back(fake_record(0.01, true));
  CHECK_THROWS_AS(empirical_power(all_null, Method::exact_k2, 0.05),
                  EstimationFailureError);
}

TEST_CASE("uniformity_report calibrates on synthetic uniform p-values") {
  std::vector<TrialRecord> recs;
  for (int i = 0; i < 2000; ++i) {
    recs.push_back(fake_record((i + 0.5) / 2000.0, true));
  }
  auto s = uniformity_report(recs, Method::exact_k2);
  CHECK(s.n == 2000);
  CHECK(s.ks_pvalue > 0.01);
  CHECK(s.reject_rate == doctest::Approx(0.05).epsilon(0.02));
  CHECK(s.ci_lo <= 0.05);
  CHECK(s.ci_hi >= 0.05);

  std::vector<TrialRecord> wrong;
  wrong.push_back(fake_record(0.2, false));
  CHECK_THROWS_AS(uniformity_report(wrong, Method::exact_k2), ConfigError);
}

TEST_CASE("kolmogorov survival function") {
  // frozen: scipy kstwobign.sf(1.0)
  CHECK(kolmogorov_sf(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-10));
  CHECK(kolmogorov_sf(0.0) == 1.0);
  CHECK(kolmogorov_sf(3.0) < 1e-7);
  // Level-0.01 critical value sits near 1.628.
  CHECK(kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(0.01));
}

TEST_CASE("run_experiment: shape, determinism, and null flags") {
  auto cfg = make_experiment(Scenario::type1_k2);
  cfg.trials = 6;
  cfg.seed = 404;
  cfg.scan.grid_points = 128;
  auto recs = run_experiment(cfg);
  REQUIRE(recs.size() == 6);
  for (const auto& r : recs) {
    CHECK(r.null_true);
    CHECK(r.pair_k == 0);
    CHECK(r.pair_kp == 1);
    for (const auto& res : r.results) {
      if (res.ok) {
        CHECK(res.report.p >= 0.0);
        CHECK(res.report.p <= 1.0);
      }
    }
  }
  auto recs2 = run_experiment(cfg);
  for (size_t i = 0; i < recs.size(); ++i) {
    REQUIRE(recs[i].results.size() == recs2[i].results.size());
    for (size_t j = 0; j < recs[i].results.size(); ++j) {
      CHECK(recs[i].results[j].report.p == recs2[i].results[j].report.p);
    }
  }
}

TEST_CASE("run_experiment: power setting 1 at delta 0 is all-null") {
  auto cfg = make_experiment(Scenario::power_setting1);
  cfg.trials = 4;
  cfg.delta_grid = {0.0, 5.0};
  cfg.seed = 7;
  cfg.scan.grid_points = 128;
  cfg.methods = {Method::exact_k2};
  auto recs = run_experiment(cfg);
  REQUIRE(recs.size() == 8);
  for (const auto& r : recs) {
    if (r.delta == 0.0) CHECK(r.null_true);
    else CHECK(!r.null_true);  // K=2 pair covers all rows, two distinct means
  }
  // Strong signal: power should be 1 at delta 5 on these trials.
  std::vector<TrialRecord> d5(recs.begin() + 4, recs.end());
  CHECK(empirical_power(d5, Method::exact_k2, 0.05) == doctest::Approx(1.0));
}

TEST_CASE("run_experiment: K=3 pair choice is within range and seeded") {
  auto cfg = make_experiment(Scenario::type1_k3);
  cfg.trials = 5;
  cfg.seed = 11;
  cfg.methods = {Method::gao_true};  // keep it cheap
  cfg.scan.grid_points = 128;
  auto recs = run_experiment(cfg);
  bool some_nontrivial = false;
  for (const auto& r : recs) {
    CHECK(r.pair_k >= 0);
    CHECK(r.pair_kp > r.pair_k);
    CHECK(r.pair_kp < 3);
    some_nontrivial |= (r.pair_k != 0 || r.pair_kp != 1);
  }
  CHECK(some_nontrivial);
}

TEST_CASE("scenario parsing round-trips") {
  for (auto s : {Scenario::type1_k2, Scenario::type1_k3, Scenario::power_setting1,
                 Scenario::power_setting2, Scenario::power_setting3,
                 Scenario::misspec_t5, Scenario::misspec_t10,
                 Scenario::misspec_noniso, Scenario::custom}) {
    CHECK(parse_scenario(scenario_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scenario("nope"), ConfigError);
}

TEST_SUITE_END();
