#include <doctest.h>

#include <cmath>

#include "clustsig/errors.hpp"
#include "clustsig/infer.hpp"
#include "clustsig/rng.hpp"
#include "clustsig/sim.hpp"
#include "support/reference.hpp"

using namespace clustsig;

namespace {

struct Instance {
  DataMatrix x;
  ClusterPartition part;
  Decomposition d;
};

Instance null_instance(std::uint64_t seed, int n = 30, int q = 2, int k = 2) {
  MixtureSpec spec;
  spec.means = {Eigen::VectorXd::Zero(q)};
  spec.sizes = {n};
  auto [x, labels] = gen_mixture(spec, seed);
  auto part = hclust(x, Linkage::average, k);
  auto d = build_decomposition(x, part, 0, 1);
  return {std::move(x), std::move(part), std::move(d)};
}

Instance separated_instance(std::uint64_t seed, double delta) {
  MixtureSpec spec;
  spec.means = {Eigen::Vector2d(0, 0), Eigen::Vector2d(delta, 0)};
  spec.sizes = {15, 15};
  auto [x, labels] = gen_mixture(spec, seed);
  auto part = hclust(x, Linkage::average, 2);
  auto d = build_decomposition(x, part, 0, 1);
  return {std::move(x), std::move(part), std::move(d)};
}

const ClusterSpec kAvg{Linkage::average, Metric::euclidean};

bool oracle_r(const Instance& inst, double r) {
  return partitions_equal(
      hclust(reconstruct_x_prime(inst.d, r), Linkage::average, inst.part.k),
      inst.part);
}

bool oracle_phi(const Instance& inst, double phi) {
  return partitions_equal(
      hclust(reconstruct_x_phi(inst.d, phi), Linkage::average, inst.part.k),
      inst.part);
}

}  // namespace

TEST_SUITE_BEGIN("infer");

TEST_CASE("scan always contains the observed statistic") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    auto inst = null_instance(seed);
    ScanConfig cfg;
    cfg.grid_points = 256;
    auto s = scan_truncation(inst.d, inst.part, Space::r_space, cfg, kAvg);
    CHECK(s.contains(statistic_R(inst.d)));
    auto sp = scan_truncation(inst.d, inst.part, Space::phi_space, cfg, kAvg);
    CHECK(sp.contains(inst.d.phi_obs()));
  }
}

TEST_CASE("well-separated clusters exclude small statistic values") {
  auto inst = separated_instance(21, 7.0);
  // Collapsing the separation changes the clustering.
  CHECK(!oracle_r(inst, 1e-6));
  ScanConfig cfg;
  cfg.grid_points = 512;
  auto s = scan_truncation(inst.d, inst.part, Space::r_space, cfg, kAvg);
  CHECK(s.intervals.front().lo > 1e-6);
}

TEST_CASE("scan endpoints match a dense brute-force localization") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    auto inst = null_instance(seed, 7, 2, 2);
    ScanConfig cfg;
    cfg.grid_points = 2048;
    cfg.refine_tol = 1e-10;
    auto s = scan_truncation(inst.d, inst.part, Space::r_space, cfg, kAvg);

    // Dense scan over the same range, then independent bisection per flip.
    Dist f = Dist::f(2, (inst.d.m - 2) * 2);
    double r_obs = statistic_R(inst.d);
    double lo = std::min(f.quantile(1e-12), r_obs / 1e3);
    double hi = std::max(f.upper_quantile(1e-12), r_obs * 1e3);
    const int dense_n = 1000000;
    double lr = std::log(hi / lo);
    std::vector<double> edges;
    bool prev = oracle_r(inst, lo);
    bool lead_true = prev;
    for (int i = 1; i < dense_n; ++i) {
      double r = lo * std::exp(lr * i / (dense_n - 1));
      bool cur = oracle_r(inst, r);
      if (cur != prev) {
        double a = lo * std::exp(lr * (i - 1) / (dense_n - 1));
        double b = r;
        while (b - a > 1e-10 * b) {
          double mid = std::sqrt(a * b);
          if (oracle_r(inst, mid) == prev) a = mid;
          else b = mid;
        }
        edges.push_back(std::sqrt(a * b));
        prev = cur;
      }
    }
    // Rebuild intervals by walking the edge list with alternating state.
    std::vector<Interval> dense;
    bool state = lead_true;
    double open_lo = state ? 0.0 : -1.0;
    for (double edge : edges) {
      if (state) {
        dense.push_back({open_lo, edge});
        state = false;
      } else {
        open_lo = edge;
        state = true;
      }
    }
    if (state) dense.push_back({open_lo, std::numeric_limits<double>::infinity()});

    REQUIRE(dense.size() == s.intervals.size());
    for (size_t i = 0; i < dense.size(); ++i) {
      if (dense[i].lo > 0.0) {
        CHECK(std::fabs(dense[i].lo - s.intervals[i].lo) <= 1e-6 * dense[i].lo);
      }
      if (std::isfinite(dense[i].hi)) {
        CHECK(std::fabs(dense[i].hi - s.intervals[i].hi) <= 1e-6 * dense[i].hi);
      } else {
        CHECK(std::isinf(s.intervals[i].hi));
      }
    }
  }
}

TEST_CASE("map_prop1 is the documented monotone change of variables") {
  DataMatrix x(4, 2);
  x << 0, 0, 2, 0, 10, 0, 12, 0;
  auto part = make_partition({0, 0, 1, 1});
  auto d = build_decomposition(x, part, 0, 1);
  CHECK(map_prop1(2.0, d) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(map_prop1(1e-12, d) < 1e-5);
  double prev = 0.0;
  for (double r : {0.1, 0.5, 1.0, 5.0, 50.0}) {
    double phi = map_prop1(r, d);
    CHECK(phi > prev);
    CHECK(map_prop1_inverse(phi, d) == doctest::Approx(r).epsilon(1e-12));
    prev = phi;
  }
}

TEST_CASE("proposition-1 membership identity (pointwise smoke test)") {
  for (std::uint64_t seed : {41u, 42u, 43u, 44u, 45u}) {
    auto inst = null_instance(seed);
    Dist f = Dist::f(2, (inst.d.m - 2) * 2);
    double r_obs = statistic_R(inst.d);
    double lo = std::min(f.quantile(1e-10), r_obs / 100);
    double hi = std::max(f.upper_quantile(1e-10), r_obs * 100);
    Rng rng(seed * 1000);
    int agree = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      double r = lo * std::pow(hi / lo, rng.uniform01());
      bool mr = oracle_r(inst, r);
      bool mp = oracle_phi(inst, map_prop1(r, inst.d));
      agree += (mr == mp);
    }
    CHECK(agree == trials);
  }
}

TEST_CASE("forced full set reduces the exact evaluation to the plain F survival") {
  TruncationSet full{{{0.0, std::numeric_limits<double>::infinity()}},
                     Space::r_space};
  int q = 2, m = 30;
  Dist f = Dist::f(q, (m - 2) * q);
  double med = f.quantile(0.5);
  // At the median the Li route must give 1/2 up to the approximation error.
  CHECK(truncated_f_survival_li(med, q, m, full) ==
        doctest::Approx(0.5).epsilon(5e-3));
  for (double p : {0.05, 0.9}) {
    CHECK(truncated_f_survival_li(f.quantile(p), q, m, full) ==
          doctest::Approx(1.0 - p).epsilon(2e-2));
  }
}

TEST_CASE("r-space and phi-space scans give the same exact p-value") {
  for (std::uint64_t seed : {52u, 53u, 54u, 55u, 56u}) {
    auto inst = null_instance(seed);
    ScanConfig cfg;
    auto a = p_value_exact_k2(inst.x, inst.part, cfg, kAvg, Space::r_space);
    auto b = p_value_exact_k2(inst.x, inst.part, cfg, kAvg, Space::phi_space);
    CHECK(a.p == doctest::Approx(b.p).epsilon(1e-6));
  }
}

TEST_CASE("exact p-value pipeline is location/scale equivariant") {
  auto inst = separated_instance(61, 3.0);
  ScanConfig cfg;
  auto base = p_value_exact_k2(inst.x, inst.part, cfg, kAvg);
  DataMatrix y = 3.7 * inst.x;
  y.rowwise() += Eigen::RowVector2d(-2.0, 11.0);
  auto part_y = hclust(y, Linkage::average, 2);
  REQUIRE(partitions_equal(part_y, inst.part));
  auto moved = p_value_exact_k2(y, part_y, cfg, kAvg);
  CHECK(moved.p == doctest::Approx(base.p).epsilon(1e-6));
  CHECK(moved.statistic == doctest::Approx(base.statistic).epsilon(1e-9));
}

TEST_CASE("importance estimator with an always-true oracle matches closed form") {
  // With S'' = (0,1) the estimand is the plain Beta survival at z_obs.
  int q = 2, m = 30;
  Dist beta = Dist::beta(q / 2.0, (m - 2) * q / 2.0);
  for (double z_obs : {0.05, 0.15, 0.4}) {
    ISConfig cfg;
    cfg.n_draws = 20000;
    cfg.seed = 1234;
    auto rep = importance_estimate(z_obs, q, m, [](double) { return true; }, cfg);
    double expect = beta.sf(z_obs);
    CHECK(std::fabs(rep.p - expect) <= 3.0 * std::max(rep.diagnostics.se, 1e-4));
    CHECK(rep.diagnostics.in_set_fraction == 1.0);
  }
}

TEST_CASE("importance estimator fails loudly with no in-set draws") {
  ISConfig cfg;
  cfg.n_draws = 100;
  cfg.tune_draws = 50;
  cfg.seed = 5;
  CHECK_THROWS_AS(
      importance_estimate(0.2, 2, 30, [](double) { return false; }, cfg),
      EstimationFailureError);
}

TEST_CASE("importance and exact paths agree on K=2 instances (smoke)") {
  double total = 0.0;
  int count = 0;
  for (std::uint64_t seed : {71u, 72u, 73u, 74u, 75u, 76u}) {
    auto inst = separated_instance(seed, seed % 2 ? 4.0 : 0.0);
    ScanConfig cfg;
    auto exact = p_value_exact_k2(inst.x, inst.part, cfg, kAvg);
    ISConfig is_cfg;
    is_cfg.n_draws = 4000;
    is_cfg.seed = seed;
    auto is = p_value_importance(inst.x, inst.part, 0, 1, is_cfg, kAvg);
    total += std::fabs(exact.p - is.p);
    ++count;
    CHECK(std::fabs(exact.p - is.p) < 0.1);
  }
  CHECK(total / count < 0.03);
}

TEST_CASE("importance estimate is seed-stable in distribution") {
  auto inst = separated_instance(81, 2.0);
  ISConfig a, b;
  a.n_draws = b.n_draws = 8000;
  a.seed = 1;
  b.seed = 99991;
  auto ra = p_value_importance(inst.x, inst.part, 0, 1, a, kAvg);
  auto rb = p_value_importance(inst.x, inst.part, 0, 1, b, kAvg);
  double combined = std::hypot(ra.diagnostics.se, rb.diagnostics.se);
  CHECK(std::fabs(ra.p - rb.p) <= 4.0 * combined + 1e-6);
  // Identical seeds reproduce bit-for-bit.
  auto ra2 = p_value_importance(inst.x, inst.part, 0, 1, a, kAvg);
  CHECK(ra.p == ra2.p);
}

TEST_CASE("gao evaluation edge cases") {
  auto inst = null_instance(91);
  TruncationSet full{{{0.0, std::numeric_limits<double>::infinity()}},
                     Space::phi_space};
  // Statistic at the left edge of the chi support: survival tends to 1.
  Decomposition d = inst.d;
  d.norm0 = 1e-9;  // phi_obs effectively 0
  SigmaEstimate sig{1.0, SigmaEstimate::Mode::true_sigma};
  auto rep = gao_eval(d, 2, sig, full);
  CHECK(rep.p > 0.999);
  CHECK(rep.method == Method::gao_true);

  SigmaEstimate bad{0.0, SigmaEstimate::Mode::true_sigma};
  CHECK_THROWS_AS(gao_eval(d, 2, bad, full), ConfigError);
}

TEST_CASE("p_value_gao end to end") {
  auto inst = separated_instance(95, 5.0);
  ScanConfig cfg;
  cfg.grid_points = 512;
  SigmaEstimate sig{1.0, SigmaEstimate::Mode::true_sigma};
  auto rep = p_value_gao(inst.x, inst.part, 0, 1, sig, cfg, kAvg);
  CHECK(rep.p >= 0.0);
  CHECK(rep.p <= 1.0);
  CHECK(rep.statistic == doctest::Approx(inst.d.phi_obs()));
  CHECK(rep.set_summary.interval_count >= 1);
  // Strong separation: the known-variance test should reject easily.
  CHECK(rep.p < 0.01);
}

TEST_SUITE_END();
