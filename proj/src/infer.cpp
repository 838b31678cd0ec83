#include "clustsig/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clustsig/errors.hpp"
#include "clustsig/rng.hpp"
#include "clustsig/special.hpp"

namespace clustsig {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailQuantile = 1e-12;
constexpr double kStatWiden = 1e3;
}  // namespace

void ScanConfig::validate() const {
  if (grid_points < 16) throw ConfigError("scan grid_points must be >= 16");
  if (!(refine_tol > 0.0)) throw ConfigError("scan refine_tol must be positive");
  if (lo != 0.0 || hi != 0.0) {
    if (!(lo > 0.0 && hi > lo)) throw ConfigError("scan bounds must satisfy 0 < lo < hi");
  }
}

void ISConfig::validate() const {
  if (n_draws < 100) throw ConfigError("importance sampling needs n_draws >= 100");
  if (!(target_inset > 0.0 && target_inset < 1.0)) {
    throw ConfigError("target_inset must be in (0,1)");
  }
  if (tune_draws < 50) throw ConfigError("tune_draws must be >= 50");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::exact_k2: return "exact_k2";
    case Method::importance: return "importance";
    case Method::gao_true: return "gao_true";
    case Method::gao_all: return "gao_all";
    case Method::gao_clustered: return "gao_clustered";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "exact_k2" || s == "exact") return Method::exact_k2;
  if (s == "importance" || s == "is") return Method::importance;
  if (s == "gao_true" || s == "gao-true") return Method::gao_true;
  if (s == "gao_all" || s == "gao-all") return Method::gao_all;
  if (s == "gao_clustered" || s == "gao-clustered") return Method::gao_clustered;
  throw ConfigError("unknown method: " + s);
}

namespace {

// Membership oracle over one scan axis.
struct Oracle {
  const Decomposition& d;
  const ClusterPartition& part;
  const ClusterSpec& cspec;
  Space space;

  bool operator()(double t) const {
    DataMatrix rec = space == Space::r_space ? reconstruct_x_prime(d, t)
                                             : reconstruct_x_phi(d, t);
    return partitions_equal(hclust(rec, cspec.linkage, part.k, cspec.metric), part);
  }
};

// Geometric bisection of an oracle flip localized in (a, b).
double refine_boundary(const Oracle& oracle, double a, double b, bool true_at_a,
                       double rel_tol) {
  while (b - a > rel_tol * b) {
    double mid = std::sqrt(a * b);
    if (oracle(mid) == true_at_a) a = mid;
    else b = mid;
  }
  return std::sqrt(a * b);
}

}  // namespace

TruncationSet scan_truncation(const Decomposition& d, const ClusterPartition& part,
                              Space space, const ScanConfig& cfg,
                              const ClusterSpec& cspec) {
  cfg.validate();
  if (space == Space::z_space) {
    throw ConfigError("scan_truncation operates in r or phi space");
  }
  const double stat = space == Space::r_space ? statistic_R(d) : d.phi_obs();

  double lo = cfg.lo, hi = cfg.hi;
  if (lo == 0.0 && hi == 0.0) {
    if (space == Space::r_space) {
      const int q = d.q();
      Dist f = Dist::f(q, (d.m - 2) * q);
      lo = f.quantile(kTailQuantile);
      hi = f.upper_quantile(kTailQuantile);
    } else {
      // Without a sigma in hand, anchor phi bounds to the observed value.
      lo = stat;
      hi = stat;
    }
    lo = std::min(lo, stat / kStatWiden);
    hi = std::max(hi, stat * kStatWiden);
  }
  if (!(stat >= lo && stat <= hi)) {
    lo = std::min(lo, stat / kStatWiden);
    hi = std::max(hi, stat * kStatWiden);
  }

  Oracle oracle{d, part, cspec, space};

  // Log-spaced grid with the observed statistic spliced in.
  const int g = cfg.grid_points;
  std::vector<double> pts;
  pts.reserve(g + 1);
  const double lr = std::log(hi / lo);
  for (int i = 0; i < g; ++i) {
    pts.push_back(lo * std::exp(lr * i / (g - 1)));
  }
  pts.push_back(stat);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<char> val(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) val[i] = oracle(pts[i]) ? 1 : 0;

  if (!val[std::lower_bound(pts.begin(), pts.end(), stat) - pts.begin()]) {
    throw NumericError(
        "membership oracle rejects the observed statistic; partition was not "
        "produced by the configured clustering of this data");
  }

  TruncationSet out;
  out.space = space;
  double cur_lo = -1.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (val[i] && cur_lo < 0.0) {
      // Entering a true run: localize the left edge (or extend to 0).
      cur_lo = i == 0 ? 0.0
                      : refine_boundary(oracle, pts[i - 1], pts[i], false,
                                        cfg.refine_tol);
    } else if (!val[i] && cur_lo >= 0.0) {
      double edge = refine_boundary(oracle, pts[i - 1], pts[i], true, cfg.refine_tol);
      out.intervals.push_back({cur_lo, edge});
      cur_lo = -1.0;
    }
  }
  if (cur_lo >= 0.0) out.intervals.push_back({cur_lo, kInf});

  if (out.intervals.empty()) {
    throw EmptyTruncationError("truncation scan found no in-set points");
  }
  return out;
}

double map_prop1(double r, const Decomposition& d) {
  if (!(r > 0.0)) throw ConfigError("map_prop1: r must be positive");
  return std::sqrt(r / (d.m - 2)) * d.norm1 * d.v_norm;
}

double map_prop1_inverse(double phi, const Decomposition& d) {
  if (phi == kInf) return kInf;
  double t = phi / (d.norm1 * d.v_norm);
  return (d.m - 2) * t * t;
}

double truncated_f_survival_li(double r_obs, int q, int m, const TruncationSet& s_r) {
  const double l = static_cast<double>(m - 2) * q;
  // Route through Li's transform onto a truncated chi-square evaluation.
  auto li = [&](double t) { return t == kInf ? kInf : li_chi2_transform(t, q, l); };
  TruncationSet s_chi = transform_set(s_r, li, s_r.space);
  double p = std::exp(truncated_log_sf(li(r_obs), Dist::chi_squared(q), s_chi));
  return std::clamp(p, 0.0, 1.0);
}

namespace {

PValueReport eval_truncated_f(const Decomposition& d, int q, double r_obs,
                              const TruncationSet& s_r, Method method) {
  PValueReport rep;
  rep.p = truncated_f_survival_li(r_obs, q, d.m, s_r);
  rep.statistic = r_obs;
  rep.method = method;
  rep.set_summary.interval_count = static_cast<int>(s_r.intervals.size());
  rep.set_summary.mass =
      std::exp(set_log_mass(Dist::f(q, static_cast<double>(d.m - 2) * q), s_r));
  return rep;
}

}  // namespace

PValueReport p_value_exact_k2(const DataMatrix& x, const ClusterPartition& part,
                              const ScanConfig& cfg, const ClusterSpec& cspec,
                              Space scan_space) {
  if (part.k != 2) {
    throw ConfigError("exact path requires K = 2 (use the importance sampler otherwise)");
  }
  Decomposition d = build_decomposition(x, part, 0, 1);
  const int q = d.q();
  const double r_obs = statistic_R(d);

  TruncationSet s_r;
  if (scan_space == Space::r_space) {
    s_r = scan_truncation(d, part, Space::r_space, cfg, cspec);
  } else {
    // Scan in phi space and pull back through the monotone K=2 map.
    ScanConfig phi_cfg = cfg;
    if (phi_cfg.lo == 0.0 && phi_cfg.hi == 0.0) {
      Dist f = Dist::f(q, (d.m - 2) * q);
      double rlo = std::min(f.quantile(kTailQuantile), r_obs / kStatWiden);
      double rhi = std::max(f.upper_quantile(kTailQuantile), r_obs * kStatWiden);
      phi_cfg.lo = map_prop1(rlo, d);
      phi_cfg.hi = map_prop1(rhi, d);
    }
    TruncationSet s_phi = scan_truncation(d, part, Space::phi_space, phi_cfg, cspec);
    s_r = transform_set(
        s_phi, [&](double phi) { return map_prop1_inverse(phi, d); }, Space::r_space);
  }
  return eval_truncated_f(d, q, r_obs, s_r, Method::exact_k2);
}

PValueReport importance_estimate(double z_obs, int q, int m,
                                 const std::function<bool(double)>& in_set,
                                 const ISConfig& cfg) {
  cfg.validate();
  const Dist beta = Dist::beta(0.5 * q, 0.5 * (m - 2) * q);

  Diagnostics diag;

  double alpha = cfg.alpha;
  if (alpha <= 0.0) {
    double best_alpha = 1.0, best_frac = -1.0;
    for (int e = -8; e <= 0; ++e) {
      double a = std::ldexp(1.0, e);
      auto pilot =
          tn_sample(z_obs, a, 0.0, 1.0, cfg.tune_draws, Rng::derive(cfg.seed, 100 + e));
      int hits = 0;
      for (double z : pilot) hits += in_set(z);
      double frac = static_cast<double>(hits) / cfg.tune_draws;
      if (best_frac < 0.0 ||
          std::fabs(frac - cfg.target_inset) < std::fabs(best_frac - cfg.target_inset)) {
        best_frac = frac;
        best_alpha = a;
      }
    }
    alpha = best_alpha;
    if (best_frac < 0.3 || best_frac > 0.7) {
      diag.warnings.push_back("proposal tuning: no alpha reached an in-set fraction in "
                              "[0.3, 0.7]; using the closest");
    }
  }
  diag.alpha = alpha;

  auto draws = tn_sample(z_obs, alpha, 0.0, 1.0, cfg.n_draws, Rng::derive(cfg.seed, 1));

  const int n = cfg.n_draws;
  std::vector<double> logw(n, -kInf);
  std::vector<char> inside(n, 0);
  int n_in = 0;
  for (int i = 0; i < n; ++i) {
    if (!in_set(draws[i])) continue;
    inside[i] = 1;
    ++n_in;
    logw[i] = beta.log_pdf(draws[i]) - tn_log_density(draws[i], z_obs, alpha, 0.0, 1.0);
  }
  diag.in_set_fraction = static_cast<double>(n_in) / n;
  if (n_in == 0) {
    throw EstimationFailureError(
        "importance sampler: no proposal draws landed in the truncation set");
  }

  double max_lw = -kInf;
  for (int i = 0; i < n; ++i) max_lw = std::max(max_lw, logw[i]);
  if (max_lw == -kInf) {
    throw EstimationFailureError("importance sampler: in-set weights underflowed");
  }
  double den = 0.0, num = 0.0, den_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    double w = std::exp(logw[i] - max_lw);
    den += w;
    den_sq += w * w;
    if (draws[i] > z_obs) num += w;
  }
  if (!(den > 0.0)) {
    throw EstimationFailureError("importance sampler: in-set weights underflowed");
  }
  const double p = std::clamp(num / den, 0.0, 1.0);

  // Linearized (ratio-estimator) standard error.
  double var_acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    double w = std::exp(logw[i] - max_lw);
    double u = (draws[i] > z_obs ? w : 0.0) - p * w;
    var_acc += u * u;
  }
  diag.se = std::sqrt(var_acc) / den;
  diag.ess = den * den / den_sq;

  PValueReport rep;
  rep.p = p;
  rep.statistic = beta_inverse_transform(z_obs, m);
  rep.method = Method::importance;
  rep.set_summary.interval_count = -1;
  // E[w 1{in set}] under the proposal estimates the Beta mass of the set.
  rep.set_summary.mass = std::exp(max_lw + std::log(den) - std::log(n));
  rep.diagnostics = diag;
  return rep;
}

PValueReport p_value_importance(const DataMatrix& x, const ClusterPartition& part,
                                int k, int k_prime, const ISConfig& cfg,
                                const ClusterSpec& cspec) {
  Decomposition d = build_decomposition(x, part, k, k_prime);
  const double r_obs = statistic_R(d);
  const double z_obs = r_obs / (d.m - 2 + r_obs);
  auto in_set = [&d, &part, &cspec](double z) {
    DataMatrix rec = reconstruct_x_prime_z(d, z);
    return partitions_equal(hclust(rec, cspec.linkage, part.k, cspec.metric), part);
  };
  PValueReport rep = importance_estimate(z_obs, d.q(), d.m, in_set, cfg);
  rep.statistic = r_obs;
  return rep;
}

std::pair<double, double> phi_scan_bounds(const Decomposition& d, int q,
                                          const std::vector<double>& sigmas,
                                          const ScanConfig& cfg) {
  if (cfg.lo != 0.0 || cfg.hi != 0.0) return {cfg.lo, cfg.hi};
  const double phi = d.phi_obs();
  double lo = phi / kStatWiden;
  double hi = phi * kStatWiden;
  Dist chi2 = Dist::chi_squared(q);
  for (double s : sigmas) {
    double c = s * d.v_norm;
    lo = std::min(lo, c * std::sqrt(chi2.quantile(kTailQuantile)));
    hi = std::max(hi, c * std::sqrt(chi2.upper_quantile(kTailQuantile)));
  }
  return {lo, hi};
}

PValueReport gao_eval(const Decomposition& d, int q, const SigmaEstimate& sigma,
                      const TruncationSet& s_phi) {
  if (!(sigma.value > 0.0)) throw ConfigError("sigma must be positive");
  const double c = sigma.value * d.v_norm;
  const double phi = d.phi_obs();
  Dist null_dist = Dist::scaled_chi(q, c);
  double p = std::exp(truncated_log_sf(phi, null_dist, s_phi));

  PValueReport rep;
  rep.p = std::clamp(p, 0.0, 1.0);
  rep.statistic = phi;
  switch (sigma.mode) {
    case SigmaEstimate::Mode::true_sigma: rep.method = Method::gao_true; break;
    case SigmaEstimate::Mode::all: rep.method = Method::gao_all; break;
    case SigmaEstimate::Mode::clustered: rep.method = Method::gao_clustered; break;
  }
  rep.set_summary.interval_count = static_cast<int>(s_phi.intervals.size());
  rep.set_summary.mass = std::exp(set_log_mass(null_dist, s_phi));
  return rep;
}

PValueReport p_value_gao(const DataMatrix& x, const ClusterPartition& part,
                         int k, int k_prime, const SigmaEstimate& sigma,
                         const ScanConfig& cfg, const ClusterSpec& cspec) {
  Decomposition d = build_decomposition(x, part, k, k_prime);
  auto [lo, hi] = phi_scan_bounds(d, d.q(), {sigma.value}, cfg);
  ScanConfig phi_cfg = cfg;
  phi_cfg.lo = lo;
  phi_cfg.hi = hi;
  TruncationSet s_phi = scan_truncation(d, part, Space::phi_space, phi_cfg, cspec);
  return gao_eval(d, d.q(), sigma, s_phi);
}

}  // namespace clustsig
