#include "clustsig/sim.hpp"

#include <algorithm>
#include <cmath>

#include "clustsig/errors.hpp"
#include "clustsig/rng.hpp"

namespace clustsig {

Scenario parse_scenario(const std::string& s) {
  if (s == "type1_k2") return Scenario::type1_k2;
  if (s == "type1_k3") return Scenario::type1_k3;
  if (s == "power_setting1") return Scenario::power_setting1;
  if (s == "power_setting2") return Scenario::power_setting2;
  if (s == "power_setting3") return Scenario::power_setting3;
  if (s == "misspec_t5") return Scenario::misspec_t5;
  if (s == "misspec_t10") return Scenario::misspec_t10;
  if (s == "misspec_noniso") return Scenario::misspec_noniso;
  if (s == "custom") return Scenario::custom;
  throw ConfigError("unknown scenario: " + s);
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::type1_k2: return "type1_k2";
    case Scenario::type1_k3: return "type1_k3";
    case Scenario::power_setting1: return "power_setting1";
    case Scenario::power_setting2: return "power_setting2";
    case Scenario::power_setting3: return "power_setting3";
    case Scenario::misspec_t5: return "misspec_t5";
    case Scenario::misspec_t10: return "misspec_t10";
    case Scenario::misspec_noniso: return "misspec_noniso";
    case Scenario::custom: return "custom";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
    throw ConfigError("alpha_level must be in (0,1)");
  }
  if (n < 3 || q < 1) throw ConfigError("need n >= 3 and q >= 1");
  if (clusters_k < 2 || clusters_k > n) throw ConfigError("K must be in [2, n]");
  if (delta_grid.empty()) throw ConfigError("delta grid must not be empty");
  if (methods.empty()) throw ConfigError("method list must not be empty");
}

ExperimentConfig make_experiment(Scenario s) {
  ExperimentConfig cfg;
  cfg.scenario = s;
  const std::vector<Method> proposed_k2 = {Method::exact_k2, Method::gao_true,
                                           Method::gao_all, Method::gao_clustered};
  const std::vector<Method> proposed_k3 = {Method::importance, Method::gao_true,
                                           Method::gao_all, Method::gao_clustered};
  switch (s) {
    case Scenario::type1_k2:
      cfg.clusters_k = 2;
      cfg.trials = 2000;
      cfg.methods = proposed_k2;
      break;
    case Scenario::type1_k3:
      cfg.clusters_k = 3;
      cfg.trials = 2000;
      cfg.methods = proposed_k3;
      break;
    case Scenario::power_setting1:
      cfg.clusters_k = 2;
      cfg.trials = 500;
      cfg.delta_grid = {0, 1, 2, 3, 4, 5, 6, 7};
      cfg.methods = proposed_k2;
      break;
    case Scenario::power_setting2:
    case Scenario::power_setting3:
      cfg.clusters_k = 3;
      cfg.trials = 500;
      cfg.delta_grid = {0, 1, 2, 3, 4, 5, 6, 7};
      cfg.methods = proposed_k3;
      break;
    case Scenario::misspec_t5:
    case Scenario::misspec_t10:
    case Scenario::misspec_noniso:
      cfg.clusters_k = 2;
      cfg.trials = 2000;
      cfg.methods = proposed_k2;
      break;
    case Scenario::custom:
      cfg.methods = proposed_k2;
      break;
  }
  return cfg;
}

const MethodResult* TrialRecord::result(Method m) const {
  for (const auto& r : results) {
    if (r.method == m) return &r;
  }
  return nullptr;
}

bool null_holds(const TrueLabels& labels, const ClusterPartition& part,
                int k, int k_prime) {
  if (static_cast<int>(labels.labels.size()) != part.n()) {
    throw DimensionError("null_holds: label vectors differ in length");
  }
  int component = -1;
  for (int i = 0; i < part.n(); ++i) {
    if (part.labels[i] != k && part.labels[i] != k_prime) continue;
    if (component == -1) component = labels.labels[i];
    else if (labels.labels[i] != component) return false;
  }
  return true;
}

bool null_holds_means(const TrueLabels& labels,
                      const std::vector<Eigen::VectorXd>& component_means,
                      const ClusterPartition& part, int k, int k_prime) {
  int first = -1;
  for (int i = 0; i < part.n(); ++i) {
    if (part.labels[i] != k && part.labels[i] != k_prime) continue;
    int c = labels.labels[i];
    if (first == -1) first = c;
    else if (c != first &&
             !(component_means[c].array() == component_means[first].array()).all()) {
      return false;
    }
  }
  return true;
}

namespace {

struct TrialData {
  DataMatrix x;
  TrueLabels labels;
  std::vector<Eigen::VectorXd> component_means;
};

TrialData make_trial_data(const ExperimentConfig& cfg, double delta,
                          std::uint64_t data_seed) {
  TrialData td;
  auto vec2 = [](double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
  };
  switch (cfg.scenario) {
    case Scenario::misspec_t5:
    case Scenario::misspec_t10:
    case Scenario::misspec_noniso: {
      MisspecKind kind = cfg.scenario == Scenario::misspec_t5 ? MisspecKind::t5
                         : cfg.scenario == Scenario::misspec_t10
                             ? MisspecKind::t10
                             : MisspecKind::noniso;
      td.x = gen_misspecified(kind, cfg.n, cfg.q, data_seed);
      td.labels.labels.assign(cfg.n, 0);
      td.component_means = {Eigen::VectorXd::Zero(cfg.q)};
      return td;
    }
    case Scenario::type1_k2:
    case Scenario::type1_k3:
    case Scenario::custom: {
      MixtureSpec spec;
      spec.means = {Eigen::VectorXd::Zero(cfg.q)};
      spec.sizes = {cfg.n};
      spec.sigma = cfg.sigma;
      auto [x, labels] = gen_mixture(spec, data_seed);
      td.x = std::move(x);
      td.labels = std::move(labels);
      td.component_means = spec.means;
      return td;
    }
    case Scenario::power_setting1: {
      MixtureSpec spec;
      spec.means = {vec2(0, 0), vec2(delta, 0)};
      spec.sizes = {cfg.n / 2, cfg.n - cfg.n / 2};
      spec.sigma = cfg.sigma;
      spec.delta = delta;
      auto [x, labels] = gen_mixture(spec, data_seed);
      td.x = std::move(x);
      td.labels = std::move(labels);
      td.component_means = spec.means;
      return td;
    }
    case Scenario::power_setting2:
    case Scenario::power_setting3: {
      MixtureSpec spec;
      if (cfg.scenario == Scenario::power_setting2) {
        spec.means = {vec2(0, 0), vec2(delta, 0),
                      vec2(delta / 2, delta * std::sqrt(3.0) / 2)};
      } else {
        spec.means = {vec2(0, 0), vec2(delta, 0), vec2(2 * delta, 0)};
      }
      int third = cfg.n / 3;
      spec.sizes = {third, third, cfg.n - 2 * third};
      spec.sigma = cfg.sigma;
      spec.delta = delta;
      auto [x, labels] = gen_mixture(spec, data_seed);
      td.x = std::move(x);
      td.labels = std::move(labels);
      td.component_means = spec.means;
      return td;
    }
  }
  throw ConfigError("unhandled scenario");
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialRecord> out;
  out.reserve(cfg.delta_grid.size() * cfg.trials);
  ClusterSpec cspec{cfg.linkage, cfg.metric};

  int global_trial = 0;
  for (double delta : cfg.delta_grid) {
    for (int t = 0; t < cfg.trials; ++t, ++global_trial) {
      const std::uint64_t trial_seed = Rng::derive(cfg.seed, global_trial);
      TrialRecord rec;
      rec.trial = global_trial;
      rec.delta = delta;

      TrialData td = make_trial_data(cfg, delta, Rng::derive(trial_seed, 1));
      ClusterPartition part = hclust(td.x, cfg.linkage, cfg.clusters_k, cfg.metric);

      // K=2 always tests the only pair; otherwise a uniformly random one.
      int k = 0, kp = 1;
      if (part.k > 2) {
        Rng pair_rng(Rng::derive(trial_seed, 2));
        k = pair_rng.below(part.k);
        kp = pair_rng.below(part.k - 1);
        if (kp >= k) ++kp;
        if (k > kp) std::swap(k, kp);
      }
      rec.pair_k = k;
      rec.pair_kp = kp;
      rec.null_true = null_holds_means(td.labels, td.component_means, part, k, kp);

      Decomposition d;
      try {
        d = build_decomposition(td.x, part, k, kp);
      } catch (const std::runtime_error& e) {
        rec.failed = true;
        rec.fail_reason = e.what();
        out.push_back(std::move(rec));
        continue;
      }

      // One phi-space scan serves every sigma plug-in on this trial.
      TruncationSet s_phi;
      bool have_phi_scan = false;
      auto ensure_phi_scan = [&]() {
        if (have_phi_scan) return;
        std::vector<double> sigmas = {cfg.sigma, sigma_hat_all(td.x).value,
                                      sigma_hat_clustered(td.x, part).value};
        auto [lo, hi] = phi_scan_bounds(d, cfg.q, sigmas, cfg.scan);
        ScanConfig phi_cfg = cfg.scan;
        phi_cfg.lo = lo;
        phi_cfg.hi = hi;
        s_phi = scan_truncation(d, part, Space::phi_space, phi_cfg, cspec);
        have_phi_scan = true;
      };

      for (Method m : cfg.methods) {
        MethodResult res;
        res.method = m;
        try {
          switch (m) {
            case Method::exact_k2:
              res.report = p_value_exact_k2(td.x, part, cfg.scan, cspec);
              break;
            case Method::importance: {
              ISConfig is_cfg;
              is_cfg.n_draws = cfg.is_draws;
              is_cfg.seed = Rng::derive(trial_seed, 3);
              res.report = p_value_importance(td.x, part, k, kp, is_cfg, cspec);
              break;
            }
            case Method::gao_true: {
              ensure_phi_scan();
              SigmaEstimate s{cfg.sigma, SigmaEstimate::Mode::true_sigma};
              res.report = gao_eval(d, cfg.q, s, s_phi);
              break;
            }
            case Method::gao_all: {
              ensure_phi_scan();
              res.report = gao_eval(d, cfg.q, sigma_hat_all(td.x), s_phi);
              break;
            }
            case Method::gao_clustered: {
              ensure_phi_scan();
              res.report = gao_eval(d, cfg.q, sigma_hat_clustered(td.x, part), s_phi);
              break;
            }
          }
          res.ok = true;
        } catch (const std::runtime_error& e) {
          res.ok = false;
          res.error = e.what();
        }
        rec.results.push_back(std::move(res));
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

namespace {

template <typename Pred>
std::pair<int, int> count_rejections(const std::vector<TrialRecord>& records,
                                     Method method, double alpha, Pred include) {
  int total = 0, rejected = 0;
  for (const auto& rec : records) {
    if (rec.failed || !include(rec)) continue;
    const MethodResult* r = rec.result(method);
    if (!r || !r->ok) continue;
    ++total;
    rejected += (r->report.p <= alpha);
  }
  return {rejected, total};
}

}  // namespace

double empirical_power(const std::vector<TrialRecord>& records, Method method,
                       double alpha_level) {
  auto [rej, total] = count_rejections(records, method, alpha_level,
                                       [](const TrialRecord& r) { return !r.null_true; });
  if (total == 0) {
    throw EstimationFailureError("empirical_power: no null-false trials");
  }
  return static_cast<double>(rej) / total;
}

double rejection_rate(const std::vector<TrialRecord>& records, Method method,
                      double alpha_level) {
  auto [rej, total] = count_rejections(records, method, alpha_level,
                                       [](const TrialRecord&) { return true; });
  if (total == 0) throw EstimationFailureError("rejection_rate: no usable trials");
  return static_cast<double>(rej) / total;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ConfigError("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

UniformitySummary uniformity_report(const std::vector<TrialRecord>& records,
                                    Method method) {
  std::vector<double> ps;
  for (const auto& rec : records) {
    if (rec.failed) continue;
    if (!rec.null_true) {
      throw ConfigError("uniformity_report expects null-true records only");
    }
    const MethodResult* r = rec.result(method);
    if (r && r->ok) ps.push_back(r->report.p);
  }
  if (ps.empty()) throw EstimationFailureError("uniformity_report: no p-values");

  UniformitySummary s;
  s.n = static_cast<int>(ps.size());
  s.ks_stat = ks_statistic(ps, [](double x) { return std::clamp(x, 0.0, 1.0); });
  s.ks_pvalue = kolmogorov_sf(std::sqrt(static_cast<double>(s.n)) * s.ks_stat);
  int rej = 0;
  for (double p : ps) rej += (p <= 0.05);
  s.reject_rate = static_cast<double>(rej) / s.n;
  double half = 1.96 * std::sqrt(s.reject_rate * (1.0 - s.reject_rate) / s.n);
  s.ci_lo = std::max(0.0, s.reject_rate - half);
  s.ci_hi = std::min(1.0, s.reject_rate + half);
  return s;
}

}  // namespace clustsig
