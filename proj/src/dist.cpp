#include "clustsig/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clustsig/errors.hpp"
#include "clustsig/rng.hpp"
#include "clustsig/special.hpp"

namespace clustsig {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogMinMass = -690.77552789821368;  // log(1e-300)
}  // namespace

const char* space_name(Space s) {
  switch (s) {
    case Space::r_space: return "r";
    case Space::phi_space: return "phi";
    case Space::z_space: return "z";
  }
  return "?";
}

bool TruncationSet::contains(double x) const { return find(x) >= 0; }

int TruncationSet::find(double x) const {
  for (size_t i = 0; i < intervals.size(); ++i) {
    if (x > intervals[i].lo && x < intervals[i].hi) return static_cast<int>(i);
  }
  return -1;
}

void TruncationSet::validate() const {
  if (intervals.empty()) throw EmptyTruncationError("truncation set has no intervals");
  double prev = -kInf;
  for (const auto& iv : intervals) {
    if (!(iv.hi > iv.lo)) throw NumericError("truncation set interval with hi <= lo");
    if (iv.lo < prev) throw NumericError("truncation set intervals out of order");
    prev = iv.hi;
  }
}

double Dist::log_cdf(double x) const {
  switch (family) {
    case Family::chi_squared:
      return x <= 0.0 ? -kInf : log_reg_gamma_p(0.5 * p1, 0.5 * x);
    case Family::f: {
      if (x <= 0.0) return -kInf;
      if (x == kInf) return 0.0;
      double y = p1 * x / (p1 * x + p2);
      return log_reg_inc_beta(y, 0.5 * p1, 0.5 * p2);
    }
    case Family::beta:
      if (x <= 0.0) return -kInf;
      if (x >= 1.0) return 0.0;
      return log_reg_inc_beta(x, p1, p2);
    case Family::scaled_chi: {
      if (x <= 0.0) return -kInf;
      double y = x / p2;
      return log_reg_gamma_p(0.5 * p1, 0.5 * y * y);
    }
  }
  return -kInf;
}

double Dist::log_sf(double x) const {
  switch (family) {
    case Family::chi_squared:
      return x <= 0.0 ? 0.0 : log_reg_gamma_q(0.5 * p1, 0.5 * x);
    case Family::f: {
      if (x <= 0.0) return 0.0;
      if (x == kInf) return -kInf;
      // 1 - I_y(d1/2, d2/2) = I_{1-y}(d2/2, d1/2) with 1-y formed exactly.
      double yc = p2 / (p1 * x + p2);
      return log_reg_inc_beta(yc, 0.5 * p2, 0.5 * p1);
    }
    case Family::beta:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return -kInf;
      return log_reg_inc_beta(1.0 - x, p2, p1);
    case Family::scaled_chi: {
      if (x <= 0.0) return 0.0;
      if (x == kInf) return -kInf;
      double y = x / p2;
      return log_reg_gamma_q(0.5 * p1, 0.5 * y * y);
    }
  }
  return 0.0;
}

double Dist::cdf(double x) const { return std::exp(log_cdf(x)); }
double Dist::sf(double x) const { return std::exp(log_sf(x)); }

double Dist::log_pdf(double x) const {
  switch (family) {
    case Family::chi_squared: {
      if (x <= 0.0) return -kInf;
      double h = 0.5 * p1;
      return (h - 1.0) * std::log(x) - 0.5 * x - h * 0.6931471805599453 -
             std::lgamma(h);
    }
    case Family::f: {
      if (x <= 0.0) return -kInf;
      double h1 = 0.5 * p1, h2 = 0.5 * p2;
      return h1 * std::log(p1 / p2) + (h1 - 1.0) * std::log(x) -
             (h1 + h2) * std::log1p(p1 * x / p2) - log_beta_fn(h1, h2);
    }
    case Family::beta: {
      if (x <= 0.0 || x >= 1.0) return -kInf;
      return (p1 - 1.0) * std::log(x) + (p2 - 1.0) * std::log1p(-x) -
             log_beta_fn(p1, p2);
    }
    case Family::scaled_chi: {
      if (x <= 0.0) return -kInf;
      double y = x / p2;
      double h = 0.5 * p1;
      // chi density in y, divided by the scale.
      return (p1 - 1.0) * std::log(y) - 0.5 * y * y - (h - 1.0) * 0.6931471805599453 -
             std::lgamma(h) - std::log(p2);
    }
  }
  return -kInf;
}

namespace {

double quantile_bisect(const Dist& d, double target_log, bool lower_side,
                       double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = lower_side ? d.log_cdf(mid) : d.log_sf(mid);
    bool go_right = lower_side ? (v < target_log) : (v > target_log);
    if (go_right) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double Dist::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("quantile: p outside (0,1)");
  if (p > 0.5) return upper_quantile(1.0 - p);
  double lo = 0.0;
  double hi = family == Family::beta ? 1.0 : 1.0;
  if (family != Family::beta) {
    while (cdf(hi) < p && hi < 1e300) hi *= 2.0;
  }
  return quantile_bisect(*this, std::log(p), true, lo, hi);
}

double Dist::upper_quantile(double tail) const {
  if (!(tail > 0.0 && tail < 1.0)) throw NumericError("upper_quantile: tail outside (0,1)");
  double lo = 0.0;
  double hi = family == Family::beta ? 1.0 : 1.0;
  if (family != Family::beta) {
    while (sf(hi) > tail && hi < 1e300) hi *= 2.0;
  }
  return quantile_bisect(*this, std::log(tail), false, lo, hi);
}

double f_cdf(double t, double d1, double d2) { return Dist::f(d1, d2).cdf(t); }

double li_chi2_transform(double t, double k, double l) {
  return (2.0 * l + k * t / 3.0 + k - 2.0) / (2.0 * l + 4.0 * k * t / 3.0) * k * t;
}

double f_cdf_li(double t, int k, int l) {
  if (t <= 0.0) return 0.0;
  return Dist::chi_squared(k).cdf(li_chi2_transform(t, k, l));
}

double interval_log_mass(const Dist& d, double lo, double hi) {
  if (!(hi > lo)) return -kInf;
  double lcdf_hi = d.log_cdf(hi);
  if (lcdf_hi <= std::log(0.5)) {
    // Both endpoints in the lower tail: CDF difference in log space.
    return lcdf_hi + log1mexp(d.log_cdf(lo) - lcdf_hi);
  }
  double lsf_lo = d.log_sf(lo);
  if (lsf_lo <= std::log(0.5)) {
    // Both in the upper tail: survival difference in log space.
    return lsf_lo + log1mexp(d.log_sf(hi) - lsf_lo);
  }
  // Interval straddles the median; the direct difference is well scaled.
  double mass = 1.0 - d.cdf(lo) - d.sf(hi);
  return mass > 0.0 ? std::log(mass) : -kInf;
}

double set_log_mass(const Dist& d, const TruncationSet& s) {
  s.validate();
  double total = -kInf;
  for (const auto& iv : s.intervals) {
    total = log_add_exp(total, interval_log_mass(d, iv.lo, iv.hi));
  }
  if (total < kLogMinMass) {
    throw EmptyTruncationError("truncation set has no detectable probability mass");
  }
  return total;
}

double truncated_log_sf(double x, const Dist& d, const TruncationSet& s) {
  double total = set_log_mass(d, s);
  double upper = -kInf;
  for (const auto& iv : s.intervals) {
    if (iv.hi <= x) continue;
    upper = log_add_exp(upper, interval_log_mass(d, std::max(iv.lo, x), iv.hi));
  }
  double v = upper - total;
  return v > 0.0 ? 0.0 : v;
}

double truncated_cdf(double x, const Dist& d, const TruncationSet& s) {
  double total = set_log_mass(d, s);
  double below = -kInf;
  for (const auto& iv : s.intervals) {
    if (iv.lo >= x) continue;
    below = log_add_exp(below, interval_log_mass(d, iv.lo, std::min(iv.hi, x)));
  }
  return std::clamp(std::exp(below - total), 0.0, 1.0);
}

TruncationSet transform_set(const TruncationSet& s,
                            const std::function<double(double)>& fn,
                            Space new_space) {
  TruncationSet out;
  out.space = new_space;
  out.intervals.reserve(s.intervals.size());
  for (const auto& iv : s.intervals) {
    out.intervals.push_back({fn(iv.lo), fn(iv.hi)});
  }
  return out;
}

double beta_transform_point(double r, int m) {
  if (r == kInf) return 1.0;
  return r / (m - 2 + r);
}

double beta_inverse_transform(double z, int m) {
  if (z >= 1.0) return kInf;
  return (m - 2) * z / (1.0 - z);
}

TruncationSet beta_transform_set(const TruncationSet& s_r, int m) {
  if (m < 3) throw ConfigError("beta_transform_set: m must be >= 3");
  return transform_set(
      s_r, [m](double r) { return beta_transform_point(r, m); }, Space::z_space);
}

std::vector<double> tn_sample(double mean, double alpha, double lo, double hi,
                              int n, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("tn_sample: alpha must be positive");
  if (!(lo < hi)) throw ConfigError("tn_sample: lo must be below hi");
  double za = (lo - mean) / alpha;
  double zb = (hi - mean) / alpha;
  double fa = norm_cdf(za);
  double fb = norm_cdf(zb);
  if (!(fb - fa >= 1e-300)) {
    throw NumericError("tn_sample: truncation interval mass underflows");
  }
  Rng rng(seed);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double u = fa + rng.uniform01_open() * (fb - fa);
    double z = mean + alpha * norm_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16));
    out[i] = std::clamp(z, lo, hi);
  }
  return out;
}

double tn_log_density(double z, double mean, double alpha, double lo, double hi) {
  if (!(alpha > 0.0)) throw ConfigError("tn_log_density: alpha must be positive");
  if (z < lo || z > hi) return -kInf;
  double za = (lo - mean) / alpha;
  double zb = (hi - mean) / alpha;
  double log_mass = norm_interval_log_mass(za, zb);
  if (log_mass < kLogMinMass) {
    throw NumericError("tn_log_density: truncation interval mass underflows");
  }
  double t = (z - mean) / alpha;
  return norm_log_pdf(t) - std::log(alpha) - log_mass;
}

}  // namespace clustsig
