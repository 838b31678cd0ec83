#include "clustsig/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "clustsig/errors.hpp"
#include "clustsig/sim.hpp"
#include "clustsig/version.hpp"

namespace clustsig::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CLUSTSIG_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

json manifest_json(const std::string& command, const json& config,
                   std::uint64_t seed, double duration_ms) {
  return json{{"command", command},
              {"version", kVersion},
              {"seed", seed},
              {"duration_ms", duration_ms},
              {"config", config}};
}

json report_json(const PValueReport& rep) {
  json diag{{"warnings", rep.diagnostics.warnings}};
  if (rep.method == Method::importance) {
    diag["in_set_fraction"] = rep.diagnostics.in_set_fraction;
    diag["ess"] = rep.diagnostics.ess;
    diag["alpha"] = rep.diagnostics.alpha;
    diag["se"] = rep.diagnostics.se;
  }
  return json{{"p", rep.p},
              {"statistic", rep.statistic},
              {"method", method_name(rep.method)},
              {"set_summary",
               {{"interval_count", rep.set_summary.interval_count},
                {"mass", rep.set_summary.mass}}},
              {"diagnostics", diag}};
}

json set_json(const TruncationSet& s) {
  json intervals = json::array();
  for (const auto& iv : s.intervals) {
    json j;
    j["lo"] = iv.lo;
    if (std::isinf(iv.hi)) j["hi"] = nullptr;
    else j["hi"] = iv.hi;
    intervals.push_back(j);
  }
  return json{{"space", space_name(s.space)}, {"intervals", intervals}};
}

struct DataArgs {
  std::string path;
  std::string header = "auto";
  bool standardize = false;

  DataMatrix load() const {
    bool has_header;
    if (header == "auto") has_header = csv_has_header(path);
    else if (header == "yes") has_header = true;
    else if (header == "no") has_header = false;
    else throw ConfigError("--header must be auto, yes, or no");
    DataMatrix x = load_csv(path, has_header);
    return standardize ? clustsig::standardize(x) : x;
  }
};

std::pair<int, int> parse_pair(const std::string& s, int k_max) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("--pair expects 'k,k-prime'");
  int k, kp;
  try {
    k = std::stoi(s.substr(0, comma));
    kp = std::stoi(s.substr(comma + 1));
  } catch (const std::exception&) {
    throw ConfigError("--pair expects two integers, got '" + s + "'");
  }
  if (k == kp) throw ConfigError("--pair clusters must be distinct");
  if (k < 1 || kp < 1 || k > k_max || kp > k_max) {
    throw ConfigError("--pair indices must be in [1, K]");
  }
  // 1-based on the command line (clusters are numbered in order of first
  // appearance), 0-based internally.
  return {k - 1, kp - 1};
}

struct TestOptions {
  DataArgs data;
  int k = 2;
  std::string linkage = "average";
  std::string metric = "euclidean";
  std::string pair = "1,2";
  std::string method;
  double sigma = -1.0;
  int n_draws = 8000;
  std::uint64_t seed = default_seed();
  bool seed_given = false;
  int grid = 2048;
  double tol = 1e-8;
  double proposal_alpha = 0.0;
};

int cmd_test(const TestOptions& opt) {
  auto t0 = Clock::now();
  json config{{"data", opt.data.path},       {"standardize", opt.data.standardize},
              {"k", opt.k},                  {"linkage", opt.linkage},
              {"metric", opt.metric},        {"pair", opt.pair},
              {"method", opt.method},        {"n_draws", opt.n_draws},
              {"grid", opt.grid},            {"tol", opt.tol}};
  if (opt.sigma > 0) config["sigma"] = opt.sigma;

  Method method = parse_method(opt.method);
  if (method == Method::gao_true && opt.sigma <= 0.0) {
    throw ConfigError("--method gao-true requires --sigma");
  }

  DataMatrix x = opt.data.load();
  ClusterSpec cspec{parse_linkage(opt.linkage), parse_metric(opt.metric)};
  ClusterPartition part = hclust(x, cspec.linkage, opt.k, cspec.metric);
  auto [k, kp] = parse_pair(opt.pair, part.k);

  ScanConfig scan;
  scan.grid_points = opt.grid;
  scan.refine_tol = opt.tol;

  std::vector<std::string> warnings;
  PValueReport rep;
  switch (method) {
    case Method::exact_k2:
      if (part.k != 2) {
        warnings.push_back("exact path requires K = 2; falling back to importance "
                           "sampling");
        method = Method::importance;
      } else if (k != 0 || kp != 1) {
        throw ConfigError("with K = 2 the only testable pair is 1,2");
      } else {
        rep = p_value_exact_k2(x, part, scan, cspec);
      }
      break;
    default:
      break;
  }
  if (method == Method::importance) {
    ISConfig is_cfg;
    is_cfg.n_draws = opt.n_draws;
    is_cfg.seed = opt.seed;
    is_cfg.alpha = opt.proposal_alpha;
    rep = p_value_importance(x, part, k, kp, is_cfg, cspec);
  } else if (method == Method::gao_true) {
    rep = p_value_gao(x, part, k, kp, {opt.sigma, SigmaEstimate::Mode::true_sigma},
                      scan, cspec);
  } else if (method == Method::gao_all) {
    rep = p_value_gao(x, part, k, kp, sigma_hat_all(x), scan, cspec);
  } else if (method == Method::gao_clustered) {
    rep = p_value_gao(x, part, k, kp, sigma_hat_clustered(x, part), scan, cspec);
  }

  rep.diagnostics.warnings.insert(rep.diagnostics.warnings.begin(), warnings.begin(),
                                  warnings.end());
  double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  json out = report_json(rep);
  out["manifest"] = manifest_json("test", config, opt.seed, ms);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct ScanOptions {
  DataArgs data;
  int k = 2;
  std::string linkage = "average";
  std::string metric = "euclidean";
  std::string pair = "1,2";
  std::string space = "r";
  int grid = 2048;
  double tol = 1e-8;
};

int cmd_scan(const ScanOptions& opt) {
  auto t0 = Clock::now();
  json config{{"data", opt.data.path}, {"standardize", opt.data.standardize},
              {"k", opt.k},            {"linkage", opt.linkage},
              {"metric", opt.metric},  {"pair", opt.pair},
              {"space", opt.space},    {"grid", opt.grid},
              {"tol", opt.tol}};

  Space space;
  if (opt.space == "r") space = Space::r_space;
  else if (opt.space == "phi") space = Space::phi_space;
  else throw ConfigError("--space must be r or phi");

  DataMatrix x = opt.data.load();
  ClusterSpec cspec{parse_linkage(opt.linkage), parse_metric(opt.metric)};
  ClusterPartition part = hclust(x, cspec.linkage, opt.k, cspec.metric);
  auto [k, kp] = parse_pair(opt.pair, part.k);
  Decomposition d = build_decomposition(x, part, k, kp);

  ScanConfig scan;
  scan.grid_points = opt.grid;
  scan.refine_tol = opt.tol;
  if (space == Space::phi_space) {
    auto [lo, hi] = phi_scan_bounds(d, d.q(), {sigma_hat_all(x).value}, scan);
    scan.lo = lo;
    scan.hi = hi;
  }

  TruncationSet s = scan_truncation(d, part, space, scan, cspec);
  double stat = space == Space::r_space ? statistic_R(d) : d.phi_obs();

  double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  json out = set_json(s);
  out["statistic"] = stat;
  out["containing_interval"] = s.find(stat);
  out["manifest"] = manifest_json("scan", config, 0, ms);
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct SimulateOptions {
  std::string scenario;
  int trials = -1;
  std::vector<double> delta_grid;
  std::vector<std::string> methods;
  std::uint64_t seed = default_seed();
  int k = -1;
  std::string linkage = "average";
  std::string metric = "euclidean";
  int n_draws = 8000;
  double alpha_level = 0.05;
  int n = -1;
  std::string out_dir;
};

int cmd_simulate(const SimulateOptions& opt) {
  auto t0 = Clock::now();
  ExperimentConfig cfg = make_experiment(parse_scenario(opt.scenario));
  if (opt.trials > 0) cfg.trials = opt.trials;
  if (!opt.delta_grid.empty()) cfg.delta_grid = opt.delta_grid;
  if (opt.k > 0) cfg.clusters_k = opt.k;
  if (opt.n > 0) cfg.n = opt.n;
  cfg.linkage = parse_linkage(opt.linkage);
  cfg.metric = parse_metric(opt.metric);
  cfg.seed = opt.seed;
  cfg.is_draws = opt.n_draws;
  cfg.alpha_level = opt.alpha_level;
  if (!opt.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : opt.methods) {
      if (m == "proposed") {
        cfg.methods.push_back(cfg.clusters_k == 2 ? Method::exact_k2
                                                  : Method::importance);
      } else {
        cfg.methods.push_back(parse_method(m));
      }
    }
  }

  std::filesystem::create_directories(opt.out_dir);
  auto records = run_experiment(cfg);

  // pvalues.csv: one row per (trial, method).
  {
    std::ofstream f(opt.out_dir + "/pvalues.csv");
    f << "trial,delta,pair_k,pair_kp,null_true,failed,method,p,statistic,ess,"
         "in_set_fraction,alpha,warning_count\n";
    for (const auto& rec : records) {
      for (const auto& res : rec.results) {
        f << rec.trial << ',' << fmt_double(rec.delta) << ',' << rec.pair_k + 1 << ','
          << rec.pair_kp + 1 << ',' << (rec.null_true ? 1 : 0) << ','
          << (rec.failed || !res.ok ? 1 : 0) << ',' << method_name(res.method) << ',';
        if (res.ok) {
          f << fmt_double(res.report.p) << ',' << fmt_double(res.report.statistic)
            << ',' << fmt_double(res.report.diagnostics.ess) << ','
            << fmt_double(res.report.diagnostics.in_set_fraction) << ','
            << fmt_double(res.report.diagnostics.alpha) << ','
            << res.report.diagnostics.warnings.size();
        } else {
          f << ",,,,,0";
        }
        f << '\n';
      }
      if (rec.failed) {
        f << rec.trial << ',' << fmt_double(rec.delta) << ',' << rec.pair_k + 1 << ','
          << rec.pair_kp + 1 << ',' << (rec.null_true ? 1 : 0) << ",1,,,,,,,0\n";
      }
    }
  }

  // power.csv: per (delta, method) power among null-false trials plus the
  // plain rejection rate.
  {
    std::ofstream f(opt.out_dir + "/power.csv");
    f << "delta,method,n_trials,n_failed,n_null_false,power,rejection_rate\n";
    for (double delta : cfg.delta_grid) {
      std::vector<TrialRecord> slice;
      for (const auto& rec : records) {
        if (rec.delta == delta) slice.push_back(rec);
      }
      for (Method m : cfg.methods) {
        int n_trials = 0, n_failed = 0, n_false = 0;
        for (const auto& rec : slice) {
          ++n_trials;
          n_failed += rec.failed ? 1 : 0;
          if (!rec.failed && !rec.null_true) ++n_false;
        }
        f << fmt_double(delta) << ',' << method_name(m) << ',' << n_trials << ','
          << n_failed << ',' << n_false << ',';
        if (n_false > 0) f << fmt_double(empirical_power(slice, m, cfg.alpha_level));
        f << ',' << fmt_double(rejection_rate(slice, m, cfg.alpha_level)) << '\n';
      }
    }
  }

  double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  json config{{"scenario", scenario_name(cfg.scenario)},
              {"n", cfg.n},
              {"q", cfg.q},
              {"sigma", cfg.sigma},
              {"k", cfg.clusters_k},
              {"linkage", linkage_name(cfg.linkage)},
              {"metric", metric_name(cfg.metric)},
              {"trials", cfg.trials},
              {"delta_grid", cfg.delta_grid},
              {"alpha_level", cfg.alpha_level},
              {"n_draws", cfg.is_draws},
              {"out", opt.out_dir}};
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  config["methods"] = methods;
  std::ofstream mf(opt.out_dir + "/manifest.json");
  mf << manifest_json("simulate", config, cfg.seed, ms).dump(2) << "\n";

  std::cout << "wrote " << opt.out_dir << "/pvalues.csv, power.csv, manifest.json ("
            << records.size() << " trial records)\n";
  return kExitOk;
}

json error_json(const std::string& type, const std::string& what) {
  return json{{"error", {{"type", type}, {"message", what}}},
              {"manifest", {{"version", kVersion}}}};
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"selective inference for data-driven clusters with unknown variance"};
  app.require_subcommand(1);

  TestOptions test_opt;
  auto* test = app.add_subcommand(
      "test", "p-value for the difference between two estimated clusters");
  test->add_option("--data", test_opt.data.path, "CSV of observations")->required();
  test->add_option("--header", test_opt.data.header, "auto|yes|no (default auto)");
  test->add_flag("--standardize", test_opt.data.standardize,
                 "center and scale columns first");
  test->add_option("--k", test_opt.k, "number of clusters")->required();
  test->add_option("--linkage", test_opt.linkage, "average|complete|single");
  test->add_option("--metric", test_opt.metric, "euclidean|sqeuclidean");
  test->add_option("--pair", test_opt.pair, "clusters to compare, e.g. 4,5 (1-based)");
  test->add_option("--method", test_opt.method,
                   "exact|is|gao-true|gao-all|gao-clustered")
      ->required();
  test->add_option("--sigma", test_opt.sigma, "noise sd for gao-true");
  test->add_option("--n-draws", test_opt.n_draws, "importance-sampling draws");
  test->add_option("--seed", test_opt.seed, "RNG seed (default $CLUSTSIG_SEED or 1)");
  test->add_option("--grid", test_opt.grid, "scan grid points");
  test->add_option("--tol", test_opt.tol, "boundary refinement tolerance");
  test->add_option("--alpha", test_opt.proposal_alpha,
                   "fix the proposal sd instead of auto-tuning");

  ScanOptions scan_opt;
  auto* scan = app.add_subcommand("scan", "report the truncation set itself");
  scan->add_option("--data", scan_opt.data.path, "CSV of observations")->required();
  scan->add_option("--header", scan_opt.data.header, "auto|yes|no (default auto)");
  scan->add_flag("--standardize", scan_opt.data.standardize,
                 "center and scale columns first");
  scan->add_option("--k", scan_opt.k, "number of clusters")->required();
  scan->add_option("--linkage", scan_opt.linkage, "average|complete|single");
  scan->add_option("--metric", scan_opt.metric, "euclidean|sqeuclidean");
  scan->add_option("--pair", scan_opt.pair, "clusters to compare (1-based)");
  scan->add_option("--space", scan_opt.space, "r|phi");
  scan->add_option("--grid", scan_opt.grid, "scan grid points");
  scan->add_option("--tol", scan_opt.tol, "boundary refinement tolerance");

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "run a named experiment");
  sim->add_option("--scenario", sim_opt.scenario,
                  "type1_k2|type1_k3|power_setting1|power_setting2|power_setting3|"
                  "misspec_t5|misspec_t10|misspec_noniso|custom")
      ->required();
  sim->add_option("--trials", sim_opt.trials, "trials per delta");
  sim->add_option("--delta-grid", sim_opt.delta_grid, "signal strengths");
  sim->add_option("--methods", sim_opt.methods,
                  "proposed|exact_k2|importance|gao_true|gao_all|gao_clustered");
  sim->add_option("--seed", sim_opt.seed, "RNG seed (default $CLUSTSIG_SEED or 1)");
  sim->add_option("--k", sim_opt.k, "override cluster count");
  sim->add_option("--n", sim_opt.n, "override sample size");
  sim->add_option("--linkage", sim_opt.linkage, "average|complete|single");
  sim->add_option("--metric", sim_opt.metric, "euclidean|sqeuclidean");
  sim->add_option("--n-draws", sim_opt.n_draws, "importance-sampling draws");
  sim->add_option("--alpha-level", sim_opt.alpha_level, "rejection threshold");
  sim->add_option("--out", sim_opt.out_dir, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (test->parsed()) return cmd_test(test_opt);
    if (scan->parsed()) return cmd_scan(scan_opt);
    if (sim->parsed()) return cmd_simulate(sim_opt);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cout << error_json("config", e.what()).dump(2) << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cout << error_json("parse", e.what()).dump(2) << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cout << error_json("dimension", e.what()).dump(2) << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cout << error_json("runtime", e.what()).dump(2) << "\n";
    return kExitRuntime;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace clustsig::cli
