#ifndef CLUSTSIG_SIM_HPP
#define CLUSTSIG_SIM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clustsig/dataset.hpp"
#include "clustsig/infer.hpp"

namespace clustsig {

enum class Scenario {
  type1_k2,
  type1_k3,
  power_setting1,
  power_setting2,
  power_setting3,
  misspec_t5,
  misspec_t10,
  misspec_noniso,
  custom
};

Scenario parse_scenario(const std::string& s);
const char* scenario_name(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::type1_k2;
  int n = 30;
  int q = 2;
  double sigma = 1.0;
  int clusters_k = 2;  // K handed to the clustering procedure
  Linkage linkage = Linkage::average;
  Metric metric = Metric::euclidean;
  int trials = 2000;
  std::vector<double> delta_grid{0.0};
  std::vector<Method> methods;
  double alpha_level = 0.05;
  std::uint64_t seed = 1;
  int is_draws = 8000;
  ScanConfig scan;

  void validate() const;
};

// Fills scenario-specific defaults (K, trial count, delta grid, methods)
// for everything the caller left unset.
ExperimentConfig make_experiment(Scenario s);

struct MethodResult {
  Method method;
  bool ok = false;
  std::string error;
  PValueReport report;
};

struct TrialRecord {
  int trial = 0;
  double delta = 0.0;
  int pair_k = 0;
  int pair_kp = 1;
  bool null_true = true;
  bool failed = false;  // decomposition degenerate; excluded from summaries
  std::string fail_reason;
  std::vector<MethodResult> results;

  const MethodResult* result(Method m) const;
};

// True iff every point of C_k union C_k' comes from one generating
// component (label equality, the strong null on recovered clusters).
bool null_holds(const TrueLabels& labels, const ClusterPartition& part,
                int k, int k_prime);

// Like null_holds but identifying components whose mean vectors coincide,
// so a two-component spec with delta = 0 counts as null-true.
bool null_holds_means(const TrueLabels& labels,
                      const std::vector<Eigen::VectorXd>& component_means,
                      const ClusterPartition& part, int k, int k_prime);

// Runs cfg.trials independent trials per delta in cfg.delta_grid. Per-trial
// seeds derive from (cfg.seed, global trial index), so any subset of trials
// reproduces identically. Degenerate trials are flagged, not fatal.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

// Rejection fraction among null-false, non-failed trials.
double empirical_power(const std::vector<TrialRecord>& records, Method method,
                       double alpha_level);

// Rejection fraction among all non-failed trials (the quantity plotted at
// delta = 0, where no trial is null-false).
double rejection_rate(const std::vector<TrialRecord>& records, Method method,
                      double alpha_level);

struct UniformitySummary {
  double ks_stat = 0.0;
  double ks_pvalue = 1.0;
  double reject_rate = 0.0;  // at level 0.05
  double ci_lo = 0.0, ci_hi = 0.0;
  int n = 0;
};

// Kolmogorov-Smirnov distance to U(0,1) plus the rejection rate at 0.05
// with a 95% binomial interval; requires every record to be null-true.
UniformitySummary uniformity_report(const std::vector<TrialRecord>& records,
                                    Method method);

// KS distance of samples against an arbitrary CDF.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov survival function: P(sqrt(n) D > x).
double kolmogorov_sf(double x);

}  // namespace clustsig

#endif
