#ifndef CLUSTSIG_INFER_HPP
#define CLUSTSIG_INFER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clustsig/cluster.hpp"
#include "clustsig/decomp.hpp"
#include "clustsig/dist.hpp"

namespace clustsig {

// Clustering procedure the membership oracles re-run.
struct ClusterSpec {
  Linkage linkage = Linkage::average;
  Metric metric = Metric::euclidean;
};

// Truncation-set scan parameters. Bounds of 0 mean "auto": the 1e-12 and
// 1-1e-12 quantiles of the null family, widened to cover the observed
// statistic times 10^-3 and 10^3. Components thinner than the refined grid
// can be missed; raise grid_points for pathological sets.
struct ScanConfig {
  int grid_points = 2048;
  double lo = 0.0;
  double hi = 0.0;
  double refine_tol = 1e-8;

  void validate() const;
};

// Importance-sampling parameters. alpha of 0 requests auto-tuning over the
// geometric grid {2^-8, ..., 2^0}: the pilot in-set fraction closest to
// target_inset wins, with a warning if nothing lands in [0.3, 0.7].
struct ISConfig {
  int n_draws = 8000;
  double alpha = 0.0;
  double target_inset = 0.5;
  int tune_draws = 400;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class Method { exact_k2, importance, gao_true, gao_all, gao_clustered };

const char* method_name(Method m);
Method parse_method(const std::string& s);

struct SetSummary {
  int interval_count = -1;  // -1: not enumerated (sampling path)
  double mass = 0.0;        // probability of the set under the null family
};

struct Diagnostics {
  double ess = 0.0;              // effective sample size (sampling path)
  double in_set_fraction = 0.0;  // fraction of proposal draws inside the set
  double alpha = 0.0;            // proposal sd actually used
  double se = 0.0;               // linearized standard error of the estimate
  std::vector<std::string> warnings;
};

struct PValueReport {
  double p = 1.0;
  double statistic = 0.0;  // R for the F paths, ||X^T v||_2 for the chi paths
  Method method = Method::exact_k2;
  SetSummary set_summary;
  Diagnostics diagnostics;
};

// Evaluates the membership oracle
//   space = r_space:   Cluster(x'(r))   == Cluster(X)
//   space = phi_space: Cluster(x(phi))  == Cluster(X)
// on a log-spaced grid (the observed statistic is always included), bisects
// every flip to refine_tol, and returns the union of maximal intervals where
// the oracle holds. The observed statistic is guaranteed to lie in the
// result.
TruncationSet scan_truncation(const Decomposition& d, const ClusterPartition& part,
                              Space space, const ScanConfig& cfg,
                              const ClusterSpec& cspec);

// The K=2 change of variables between the two truncation axes:
// phi = sqrt(r/(m-2)) * ||P1 X||_F * ||v||_2. Strictly increasing in r.
double map_prop1(double r, const Decomposition& d);
double map_prop1_inverse(double phi, const Decomposition& d);

// Truncated F_{q,(m-2)q} survival of r_obs over an r-space set, evaluated
// by mapping statistic and set through the Li chi-square transform. This is
// the evaluation half of the exact path, exposed for direct use on a
// caller-supplied set.
double truncated_f_survival_li(double r_obs, int q, int m, const TruncationSet& s_r);

// The importance-sampling estimator with an arbitrary membership predicate
// over z in (0,1). p_value_importance wires in the re-clustering oracle.
PValueReport importance_estimate(double z_obs, int q, int m,
                                 const std::function<bool(double)>& in_set,
                                 const ISConfig& cfg);

// Exact path for K=2 with a location/scale-invariant clustering: truncated
// F_{q,(m-2)q} survival of R over S', evaluated through the Li chi-square
// transform. scan_space selects whether S' is scanned directly in r or
// pulled back from a phi-space scan.
PValueReport p_value_exact_k2(const DataMatrix& x, const ClusterPartition& part,
                              const ScanConfig& cfg, const ClusterSpec& cspec,
                              Space scan_space = Space::r_space);

// General path (any K, any deterministic clustering): importance sampling
// in Beta space with a truncated-normal proposal. Set membership of every
// draw is decided by re-clustering the reconstruction, never by an interval
// list.
PValueReport p_value_importance(const DataMatrix& x, const ClusterPartition& part,
                                int k, int k_prime, const ISConfig& cfg,
                                const ClusterSpec& cspec);

// Known-variance baseline: truncated rescaled-chi survival of ||X^T v||_2
// over the phi-space set, with sigma supplied (true value or a plug-in).
PValueReport p_value_gao(const DataMatrix& x, const ClusterPartition& part,
                         int k, int k_prime, const SigmaEstimate& sigma,
                         const ScanConfig& cfg, const ClusterSpec& cspec);

// Pieces of p_value_gao exposed so a caller evaluating several sigma
// plug-ins on one dataset can reuse a single scan.
std::pair<double, double> phi_scan_bounds(const Decomposition& d, int q,
                                          const std::vector<double>& sigmas,
                                          const ScanConfig& cfg);
PValueReport gao_eval(const Decomposition& d, int q, const SigmaEstimate& sigma,
                      const TruncationSet& s_phi);

}  // namespace clustsig

#endif
