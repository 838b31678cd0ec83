#include <doctest.h>

#include <cmath>
#include <random>

#include "clustsig/dist.hpp"
#include "clustsig/errors.hpp"
#include "support/quadrature.hpp"

using namespace clustsig;

TEST_SUITE_BEGIN("dist");

TEST_CASE("f_cdf basics and quadrature agreement") {
  CHECK(f_cdf(0.0, 2, 56) == 0.0);
  // F_{d,d} has median 1 (the Beta(d/2,d/2) median is 1/2).
  for (double d : {2.0, 7.0, 30.0}) {
    CHECK(f_cdf(1.0, d, d) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(f_cdf(1.0, 2, 56) == doctest::Approx(0.625647328782398).epsilon(1e-12));
  for (double t : {0.1, 1.0, 3.5, 8.0}) {
    CHECK(f_cdf(t, 2, 56) ==
          doctest::Approx(oracle::f_cdf_quad(t, 2, 56)).epsilon(1e-9));
    CHECK(f_cdf(t, 1, 5) == doctest::Approx(oracle::f_cdf_quad(t, 1, 5)).epsilon(1e-9));
  }
  // Tail survival keeps relative precision (frozen: scipy f.sf(19, 2, 56)).
  CHECK(std::exp(Dist::f(2, 56).log_sf(19.0)) ==
        doctest::Approx(5.031353774614646e-07).epsilon(1e-10));
}

TEST_CASE("beta-F transform identity") {
  // If Z ~ Beta(a/2, b/2) then (b/a) Z/(1-Z) ~ F_{a,b}.
  double a = 2, b = 56;
  Dist fd = Dist::f(a, b);
  Dist bd = Dist::beta(a / 2, b / 2);
  for (int i = 1; i <= 20; ++i) {
    double p = i / 21.0;
    double t = fd.quantile(p);
    double z = t / (b / a + t);
    CHECK(bd.cdf(z) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("f_cdf_li approximation quality") {
  CHECK(f_cdf_li(0.0, 2, 56) == 0.0);
  double worst56 = 0.0, worst560 = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double t = 20.0 * i / 400;
    worst56 = std::max(worst56, std::fabs(f_cdf_li(t, 2, 56) - f_cdf(t, 2, 56)));
    worst560 = std::max(worst560, std::fabs(f_cdf_li(t, 2, 560) - f_cdf(t, 2, 560)));
  }
  CHECK(worst56 <= 1e-3);
  CHECK(worst560 < worst56);  // accuracy improves as l grows
  // The transform must stay monotone for set mapping to be valid.
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double g = li_chi2_transform(i * 0.2, 2, 56);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("truncated cdf: no truncation and boundary saturation") {
  Dist chi = Dist::chi_squared(3);
  TruncationSet full{{{0.0, std::numeric_limits<double>::infinity()}},
                     Space::r_space};
  for (double x : {0.5, 2.0, 9.0}) {
    CHECK(truncated_cdf(x, chi, full) == doctest::Approx(chi.cdf(x)).epsilon(1e-12));
  }
  TruncationSet window{{{1.0, 2.0}}, Space::r_space};
  CHECK(truncated_cdf(2.5, chi, window) == 1.0);
  CHECK(truncated_cdf(0.5, chi, window) == 0.0);
}

TEST_CASE("truncated cdf against a rejection-sampling oracle") {
  // chi2_2 restricted to (1,2) u (3,4); 1e6 accepted draws.
  TruncationSet s{{{1.0, 2.0}, {3.0, 4.0}}, Space::r_space};
  std::mt19937_64 gen(99);
  std::chi_squared_distribution<double> chi2(2.0);
  int accepted = 0;
  int below15 = 0, below35 = 0;
  while (accepted < 1000000) {
    double v = chi2(gen);
    if (!s.contains(v)) continue;
    ++accepted;
    below15 += (v <= 1.5);
    below35 += (v <= 3.5);
  }
  Dist chi = Dist::chi_squared(2);
  double n = 1e6;
  double p15 = below15 / n, p35 = below35 / n;
  double se15 = std::sqrt(p15 * (1 - p15) / n);
  double se35 = std::sqrt(p35 * (1 - p35) / n);
  CHECK(std::fabs(truncated_cdf(1.5, chi, s) - p15) <= 3 * se15);
  CHECK(std::fabs(truncated_cdf(3.5, chi, s) - p35) <= 3 * se35);
}

TEST_CASE("deep-tail truncation matches the exponential closed form") {
  // chi2_2 is Exp(1/2): on (30,31) the truncated CDF at x is
  // (e^{-15} - e^{-x/2}) / (e^{-15} - e^{-15.5}).
  Dist chi = Dist::chi_squared(2);
  TruncationSet s{{{30.0, 31.0}}, Space::r_space};
  double expect = (std::exp(-15.25) - std::exp(-15.0)) /
                  (std::exp(-15.5) - std::exp(-15.0));
  CHECK(truncated_cdf(30.5, chi, s) == doctest::Approx(expect).epsilon(1e-10));
  // The survival side must carry relative precision.
  double lsf = truncated_log_sf(30.5, chi, s);
  double expect_sf = (std::exp(-15.25) - std::exp(-15.5)) /
                     (std::exp(-15.0) - std::exp(-15.5));
  CHECK(std::exp(lsf) == doctest::Approx(expect_sf).epsilon(1e-10));
  CHECK(std::exp(lsf) == doctest::Approx(0.4378234991142019).epsilon(1e-10));
}

TEST_CASE("truncated cdf is monotone and hits 0/1 outside the hull") {
  Dist f = Dist::f(2, 20);
  TruncationSet s{{{0.2, 0.9}, {2.0, 5.0}}, Space::r_space};
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    double x = 0.05 + i * 0.03;
    double v = truncated_cdf(x, f, s);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK(truncated_cdf(0.19, f, s) == 0.0);
  CHECK(truncated_cdf(5.01, f, s) == 1.0);
}

TEST_CASE("empty-mass truncation raises") {
  Dist chi = Dist::chi_squared(2);
  TruncationSet far{{{5000.0, 5001.0}}, Space::r_space};
  CHECK_THROWS_AS(set_log_mass(chi, far), EmptyTruncationError);
  TruncationSet none{{}, Space::r_space};
  CHECK_THROWS_AS(set_log_mass(chi, none), EmptyTruncationError);
}

TEST_CASE("truncated normal sampling") {
  auto draws = tn_sample(0.5, 0.1, 0.0, 1.0, 100000, 31);
  for (double z : draws) {
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
  }
  // Symmetric truncation: mean stays at 0.5.
  double mean = 0.0;
  for (double z : draws) mean += z;
  mean /= draws.size();
  double se = 0.1 / std::sqrt(1e5);
  CHECK(std::fabs(mean - 0.5) < 5 * se);

  CHECK(draws == tn_sample(0.5, 0.1, 0.0, 1.0, 100000, 31));
  CHECK(draws != tn_sample(0.5, 0.1, 0.0, 1.0, 100000, 32));
  CHECK_THROWS_AS(tn_sample(0.0, 1e-3, 500.0, 501.0, 10, 1), NumericError);
}

TEST_CASE("truncated normal density integrates to one and is symmetric") {
  double mass = oracle::integrate(
      [](double z) { return std::exp(tn_log_density(z, 0.3, 0.2, 0.0, 1.0)); }, 0.0,
      1.0, 1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(tn_log_density(0.3 + 0.07, 0.3, 0.2, 0.0, 1.0) ==
        doctest::Approx(tn_log_density(0.3 - 0.07, 0.3, 0.2, 0.0, 1.0))
            .epsilon(1e-12));
  CHECK(std::isinf(tn_log_density(1.2, 0.3, 0.2, 0.0, 1.0)));
  // Matches the plain normal pdf ratio against the proposal's own draws.
  double inside = tn_log_density(0.5, 0.5, 0.1, 0.0, 1.0);
  CHECK(std::exp(inside) > oracle::normal_density(0.5, 0.5, 0.1) - 1e-9);
}

TEST_CASE("beta_transform_set") {
  using std::numeric_limits;
  TruncationSet full{{{0.0, numeric_limits<double>::infinity()}}, Space::r_space};
  auto z_full = beta_transform_set(full, 5);
  CHECK(z_full.intervals.size() == 1);
  CHECK(z_full.intervals[0].lo == 0.0);
  CHECK(z_full.intervals[0].hi == 1.0);
  CHECK(z_full.space == Space::z_space);

  TruncationSet s{{{2.0, 6.0}}, Space::r_space};
  auto z = beta_transform_set(s, 4);
  CHECK(z.intervals[0].lo == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(z.intervals[0].hi == doctest::Approx(0.75).epsilon(1e-14));

  // Round trip through the inverse map.
  TruncationSet multi{{{0.3, 1.7}, {2.5, 40.0}}, Space::r_space};
  auto zz = beta_transform_set(multi, 9);
  for (size_t i = 0; i < multi.intervals.size(); ++i) {
    CHECK(beta_inverse_transform(zz.intervals[i].lo, 9) ==
          doctest::Approx(multi.intervals[i].lo).epsilon(1e-10));
    CHECK(beta_inverse_transform(zz.intervals[i].hi, 9) ==
          doctest::Approx(multi.intervals[i].hi).epsilon(1e-10));
  }
}

TEST_CASE("quantiles invert the cdf far into the tails") {
  for (auto d : {Dist::f(2, 56), Dist::chi_squared(2), Dist::beta(1, 28)}) {
    for (double p : {1e-12, 1e-4, 0.3, 0.5, 0.9}) {
      CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-6));
    }
    CHECK(d.sf(d.upper_quantile(1e-12)) == doctest::Approx(1e-12).epsilon(1e-6));
  }
}

TEST_CASE("scaled chi family") {
  // c * chi_q at x has the law of chi2_q at (x/c)^2.
  Dist sc = Dist::scaled_chi(2, 0.7);
  Dist chi = Dist::chi_squared(2);
  for (double x : {0.2, 0.7, 1.9}) {
    CHECK(sc.cdf(x) == doctest::Approx(chi.cdf((x / 0.7) * (x / 0.7))).epsilon(1e-12));
  }
  double mass = oracle::integrate(
      [](double x) { return std::exp(Dist::scaled_chi(3, 1.3).log_pdf(x)); }, 0.0,
      20.0, 1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_SUITE_END();
