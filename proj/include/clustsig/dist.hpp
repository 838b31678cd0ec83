#ifndef CLUSTSIG_DIST_HPP
#define CLUSTSIG_DIST_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace clustsig {

// Which statistic axis a truncation set lives on.
enum class Space { r_space, phi_space, z_space };

const char* space_name(Space s);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;  // may be +infinity (or 1 for z-space sets)
};

// Finite union of disjoint open intervals: the values of the statistic that
// reproduce the observed clustering.
struct TruncationSet {
  std::vector<Interval> intervals;
  Space space = Space::r_space;

  bool contains(double x) const;
  // Index of the interval containing x, or -1.
  int find(double x) const;
  // Throws if intervals are unsorted, overlapping, or empty-measure.
  void validate() const;
};

// Null families the tests truncate. A small tagged value type: the library
// only ever needs these four, and keeping them closed lets every evaluation
// route through the same log-space tail machinery.
struct Dist {
  enum class Family { chi_squared, f, beta, scaled_chi };
  Family family = Family::chi_squared;
  double p1 = 1.0;  // chi_squared: dof | f: d1 | beta: a | scaled_chi: dof
  double p2 = 0.0;  // f: d2 | beta: b | scaled_chi: scale c (c * chi_dof)

  static Dist chi_squared(double dof) { return {Family::chi_squared, dof, 0.0}; }
  static Dist f(double d1, double d2) { return {Family::f, d1, d2}; }
  static Dist beta(double a, double b) { return {Family::beta, a, b}; }
  static Dist scaled_chi(double dof, double scale) {
    return {Family::scaled_chi, dof, scale};
  }

  double cdf(double x) const;
  double sf(double x) const;
  double log_cdf(double x) const;
  double log_sf(double x) const;
  double log_pdf(double x) const;

  // Inverse CDF by bisection; `upper_quantile(t)` solves sf(x) = t without
  // forming 1 - t.
  double quantile(double p) const;
  double upper_quantile(double tail) const;
};

// F distribution CDF via the regularized incomplete beta.
double f_cdf(double t, double d1, double d2);

// Li's F -> chi-square tail approximation:
//   F_{F_{k,l}}(t) ~= F_{chi2_k}(li_chi2_transform(t, k, l)).
// The transform is strictly increasing in t, so it maps truncation sets
// interval-by-interval.
double li_chi2_transform(double t, double k, double l);
double f_cdf_li(double t, int k, int l);

// log P(Z in (lo,hi)) under d, using whichever tail avoids cancellation.
double interval_log_mass(const Dist& d, double lo, double hi);

// log P(Z in S); throws EmptyTruncationError below 1e-300.
double set_log_mass(const Dist& d, const TruncationSet& s);

// P(Z <= x | Z in S) and log P(Z > x | Z in S). The survival form is the
// one p-values use: it stays relatively accurate when the conditional upper
// tail is tiny.
double truncated_cdf(double x, const Dist& d, const TruncationSet& s);
double truncated_log_sf(double x, const Dist& d, const TruncationSet& s);

// Monotone-increasing endpoint map applied to a set (infinity-aware).
TruncationSet transform_set(const TruncationSet& s,
                            const std::function<double(double)>& fn,
                            Space new_space);

// r-space -> z-space via z = r / (m-2+r); inverse of beta_inverse_transform.
TruncationSet beta_transform_set(const TruncationSet& s_r, int m);
double beta_transform_point(double r, int m);
double beta_inverse_transform(double z, int m);

// n iid draws from Normal(mean, alpha^2) truncated to [lo, hi], by inverse
// CDF (no rejection; draw count is seed-stable).
std::vector<double> tn_sample(double mean, double alpha, double lo, double hi,
                              int n, std::uint64_t seed);

// log density of the truncated normal at z (normalized over [lo, hi]);
// -inf outside the support.
double tn_log_density(double z, double mean, double alpha, double lo, double hi);

}  // namespace clustsig

#endif
