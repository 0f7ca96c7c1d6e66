#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gfdet/complexity.hpp"
#include "gfdet/harness.hpp"
#include "gfdet/sync_detector.hpp"
#include "gfdet/verify.hpp"

namespace {

using namespace gfdet;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

struct CommonFlags {
  std::map<std::string, std::string> values;
  std::string config_path;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat JSON config file");
    static const char* keys[] = {"case",       "N",          "M",       "L",
                                 "D",          "Omega",      "Q",       "noise_var",
                                 "active_prob", "kappa_db",  "kappa_linear",
                                 "n_trials",   "seed",       "strategy", "epsilon",
                                 "max_iters",  "threads"};
    for (const char* k : keys) {
      auto cb = [this, k](const std::string& v) { values[k] = v; };
      app->add_option_function<std::string>(std::string("--") + k, cb);
    }
  }

  RunConfig build(bool strict_case = true) const {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = read_config_file(config_path);
    if (const char* env_seed = std::getenv("GFDET_SEED"); env_seed && !kv.count("seed"))
      kv["seed"] = env_seed;
    for (const auto& [k, v] : values) kv[k] = v;  // flags win
    return parse_config(kv, strict_case);
  }
};

// padding handles Q < L_i, but a grid at least as fine as the signal length
// gives better detection for the same cost
void note_if_coarse_grid(const RunConfig& cfg) {
  if (has_cfo(cfg.kase) && cfg.params.Q < cfg.params.signal_rows(cfg.kase))
    std::fprintf(stderr, "note: Q (%d) is below the signal length L_i (%d); Q >= L_i is preferable\n",
                 cfg.params.Q, cfg.params.signal_rows(cfg.kase));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

int cmd_detect(const CommonFlags& flags, double theta) {
  const RunConfig cfg = flags.build();
  note_if_coarse_grid(cfg);
  const TrialData td = make_trial(cfg, cfg.master_seed);
  const OffsetGrid grid = offset_grid(cfg.kase, cfg.params.D, cfg.params.Omega, cfg.params.Q);

  VectorXd a_hat;
  VectorXi t_hat = VectorXi::Zero(cfg.params.N);
  VectorXd omega_hat = VectorXd::Zero(cfg.params.N);
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  Strategy strategy = cfg.resolve_strategy();
  if (cfg.kase == Case::Sync) {
    const SyncResult r = run_sync(td.input, cfg.epsilon, cfg.max_iters);
    a_hat = r.a_hat;
    objective = r.objective_trace.back();
    iterations = r.iterations;
    converged = r.converged;
  } else {
    const AsyncResult r = run_async(td.input, grid, strategy, cfg.epsilon, cfg.max_iters);
    a_hat = r.a_hat;
    t_hat = r.t_hat;
    omega_hat = r.omega_hat;
    objective = r.objective_trace.back();
    iterations = r.iterations;
    converged = r.converged;
  }

  const VectorXi a_bin = binarize(a_hat, theta);
  std::ostringstream os;
  os << "{\n";
  os << "  \"case\": \"" << to_string(cfg.kase) << "\",\n";
  os << "  \"strategy\": \"" << to_string(strategy) << "\",\n";
  os << "  \"seed\": " << cfg.master_seed << ",\n";
  os << "  \"objective\": " << num(objective) << ",\n";
  os << "  \"iterations\": " << iterations << ",\n";
  os << "  \"converged\": " << (converged ? "true" : "false") << ",\n";
  os << "  \"theta\": " << num(theta) << ",\n";
  os << "  \"n_true_active\": " << td.scenario.a_true.sum() << ",\n";
  os << "  \"n_detected\": " << a_bin.sum() << ",\n";
  os << "  \"error_probability\": " << num(error_probability(td.scenario.a_true, a_bin))
     << ",\n";
  os << "  \"detected\": [";
  bool first = true;
  for (int n = 0; n < cfg.params.N; ++n) {
    if (!a_bin[n]) continue;
    if (!first) os << ",";
    first = false;
    os << "\n    {\"device\": " << n << ", \"a_hat\": " << num(a_hat[n]);
    if (has_sto(cfg.kase)) os << ", \"t_hat\": " << t_hat[n];
    if (has_cfo(cfg.kase)) os << ", \"omega_hat_over_pi\": " << num(omega_hat[n] / M_PI);
    os << "}";
  }
  os << (first ? "]\n" : "\n  ]\n") << "}\n";
  std::fputs(os.str().c_str(), stdout);
  return 0;
}

int cmd_sweep(const CommonFlags& flags, std::string out_csv, std::string out_json) {
  const RunConfig cfg = flags.build();
  note_if_coarse_grid(cfg);
  const RunResult r = run_trials(cfg);

  std::ostringstream csv;
  csv << "theta,error_prob,std_err\n";
  for (std::size_t i = 0; i < r.sweep.theta_grid.size(); ++i)
    csv << num(r.sweep.theta_grid[i]) << "," << num(r.sweep.error_prob[i]) << ","
        << num(r.sweep.std_err[i]) << "\n";

  std::ostringstream js;
  js << "{\n";
  js << "  \"case\": \"" << to_string(cfg.kase) << "\",\n";
  js << "  \"strategy\": \"" << to_string(r.strategy_used) << "\",\n";
  js << "  \"n_trials\": " << cfg.n_trials << ",\n";
  js << "  \"n_failed\": " << r.n_failed << ",\n";
  js << "  \"theta_star\": " << num(r.sweep.theta_star) << ",\n";
  js << "  \"error_star\": " << num(r.sweep.error_star) << ",\n";
  js << "  \"median_iters\": " << num(r.median_iterations) << ",\n";
  js << "  \"median_time_ns\": " << r.median_time_ns << ",\n";
  if (has_sto(cfg.kase) && r.sto_confident_devices > 0) {
    js << "  \"sto_exact_fraction\": " << num(r.sto_exact_fraction) << ",\n";
    js << "  \"sto_confident_devices\": " << r.sto_confident_devices << ",\n";
  }
  js << "  \"digest\": \"" << std::hex << r.digest << std::dec << "\"\n";
  js << "}\n";

  if (out_csv.empty() && !cfg.out_csv.empty()) out_csv = cfg.out_csv;
  if (out_json.empty() && !cfg.out_json.empty()) out_json = cfg.out_json;
  if (!out_json.empty()) {
    std::ofstream f(out_json, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_json);
    f << js.str();
  }
  if (!out_csv.empty()) {
    std::ofstream f(out_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_csv);
    f << csv.str();
    std::fputs(js.str().c_str(), stdout);
  } else {
    // keep stdout single-format: CSV there, summary on stderr
    std::fputs(csv.str().c_str(), stdout);
    std::fputs(js.str().c_str(), stderr);
  }
  return 0;
}

int cmd_bench(const CommonFlags& flags, const std::string& d_list, const std::string& om_list,
              const std::string& q_list, int bench_trials, std::string out_csv) {
  RunConfig cfg = flags.build();
  if (cfg.kase == Case::Sync)
    throw std::invalid_argument("bench compares the asynchronous strategies; pick case t|f|tf");

  std::vector<int> ds;
  std::vector<double> oms;
  std::vector<int> qs;
  if (has_sto(cfg.kase))
    for (const auto& s : split_list(d_list.empty() ? std::to_string(cfg.params.D) : d_list))
      ds.push_back(std::stoi(s));
  else
    ds.push_back(0);
  if (has_cfo(cfg.kase)) {
    for (const auto& s :
         split_list(om_list.empty() ? format_omega(cfg.params.Omega) : om_list))
      oms.push_back(parse_omega_spec(s));
    for (const auto& s : split_list(q_list.empty() ? std::to_string(cfg.params.Q) : q_list))
      qs.push_back(std::stoi(s));
  } else {
    oms.push_back(0.0);
    qs.push_back(1);
  }

  std::vector<OffsetPoint> points;
  for (const int d : ds)
    for (const double om : oms)
      for (const int q : qs) points.push_back(OffsetPoint{d, om, q});
  std::sort(points.begin(), points.end(), [](const OffsetPoint& a, const OffsetPoint& b) {
    return std::tie(a.D, a.Omega, a.Q) < std::tie(b.D, b.Omega, b.Q);
  });

  const auto table = timing_compare(cfg, points, bench_trials);
  std::ostringstream csv;
  csv << "case,D,omega_over_pi,Q,strategy,median_time_ns,flops_model\n";
  for (const TimingPoint& tp : table) {
    csv << to_string(tp.kase) << "," << tp.D << "," << num(tp.Omega / M_PI) << "," << tp.Q
        << "," << to_string(tp.strategy) << "," << tp.median_time_ns << ","
        << num(tp.flops_model) << "\n";
    if (!tp.outputs_match)
      throw numeric_error("strategy outputs diverged on a timed instance");
  }
  if (out_csv.empty() && !cfg.out_csv.empty()) out_csv = cfg.out_csv;
  if (!out_csv.empty()) {
    std::ofstream f(out_csv, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_csv);
    f << csv.str();
  }
  std::fputs(csv.str().c_str(), stdout);
  return 0;
}

int cmd_verify(bool quick, std::uint64_t seed) {
  const auto suites = run_verification(quick, seed);
  int total = 0;
  for (const auto& s : suites) {
    total += s.checks;
    std::printf("[%s] %-24s %d checks, %d failures%s%s\n", s.passed() ? "PASS" : "FAIL",
                s.name.c_str(), s.checks, s.failures, s.detail.empty() ? "" : ": ",
                s.detail.c_str());
  }
  std::printf("%zu suites, %d checks\n", suites.size(), total);
  return all_passed(suites) ? 0 : 1;
}

int cmd_complexity(const CommonFlags& flags) {
  const RunConfig cfg = flags.build(/*strict_case=*/false);
  if (cfg.kase == Case::Sync)
    throw std::invalid_argument("the flop model covers the asynchronous cases; pick t|f|tf");
  const auto& p = cfg.params;
  const CrossoverThresholds th = crossover_thresholds(p.L, p.M, p.Q, p.D, p.Omega);
  const StrategyChoice rec = recommend_strategy(cfg.kase, p.L, p.M, p.Q, p.D, p.Omega);
  std::ostringstream os;
  os << "{\n";
  os << "  \"case\": \"" << to_string(cfg.kase) << "\",\n";
  os << "  \"L\": " << p.L << ", \"M\": " << p.M << ", \"Q\": " << p.Q << ", \"D\": " << p.D
     << ", \"Omega_over_pi\": " << num(p.Omega / M_PI) << ",\n";
  os << "  \"flops_direct_per_device\": "
     << num(flops_direct_per_device(cfg.kase, p.L, p.M, p.D, p.Omega, p.Q)) << ",\n";
  os << "  \"flops_fft_per_device\": "
     << num(flops_fft_per_device(cfg.kase, p.L, p.M, p.D, p.Omega, p.Q)) << ",\n";
  os << "  \"thresholds\": {\n";
  os << "    \"Dbar_t\": " << num(th.dbar_t) << ",\n";
  os << "    \"Dunder_t\": " << num(th.dunder_t) << ",\n";
  os << "    \"Omegabar_f_over_pi\": " << num(th.omegabar_f / M_PI) << ",\n";
  os << "    \"Omegaunder_f_over_pi\": " << num(th.omegaunder_f / M_PI) << ",\n";
  os << "    \"Dbar_tf\": " << num(th.dbar_tf) << ",\n";
  os << "    \"Omegabar_tf_over_pi\": " << num(th.omegabar_tf / M_PI) << ",\n";
  os << "    \"Dunder_tf\": " << num(th.dunder_tf) << ",\n";
  os << "    \"Omegaunder_tf_over_pi\": " << num(th.omegaunder_tf / M_PI) << ",\n";
  os << "    \"bounds_valid\": " << (th.bounds_valid ? "true" : "false") << "\n";
  os << "  },\n";
  os << "  \"recommended_strategy\": \"" << to_string(rec.strategy) << "\",\n";
  os << "  \"in_band\": " << (rec.in_band ? "true" : "false") << "\n";
  os << "}\n";
  std::fputs(os.str().c_str(), stdout);
  return 0;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-likelihood device activity detection under Rician fading"};
  app.require_subcommand(1);

  CommonFlags detect_flags, sweep_flags, bench_flags, cx_flags;

  auto* detect = app.add_subcommand("detect", "run one scenario and one detector");
  detect_flags.attach(detect);
  double theta = 0.5;
  detect->add_option("--theta", theta, "activity threshold for the printed summary");

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo run with a threshold sweep");
  sweep_flags.attach(sweep);
  std::string sweep_csv, sweep_json;
  sweep->add_option("--out-csv", sweep_csv, "CSV output path (theta, error_prob, std_err)");
  sweep->add_option("--out-json", sweep_json, "summary JSON output path");

  auto* bench = app.add_subcommand("bench", "time both strategies over an offset grid");
  bench_flags.attach(bench);
  std::string d_list, om_list, q_list, bench_csv;
  int bench_trials = 5;
  bench->add_option("--D-list", d_list, "comma-separated D values");
  bench->add_option("--Omega-list", om_list, "comma-separated Omega values (<x>pi form)");
  bench->add_option("--Q-list", q_list, "comma-separated Q values");
  bench->add_option("--bench-trials", bench_trials, "trials per grid point");
  bench->add_option("--out-csv", bench_csv, "CSV output path");

  auto* verify = app.add_subcommand("verify", "run the oracle suites; nonzero exit on failure");
  bool quick = false;
  std::uint64_t verify_seed = 2024;
  verify->add_flag("--quick", quick, "smaller repetition counts");
  verify->add_option("--seed", verify_seed, "suite seed");

  auto* complexity = app.add_subcommand("complexity", "flop model and crossover thresholds");
  cx_flags.attach(complexity);

  try {
    app.parse(argc, argv);
    if (*detect) return cmd_detect(detect_flags, theta);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_csv, sweep_json);
    if (*bench) return cmd_bench(bench_flags, d_list, om_list, q_list, bench_trials, bench_csv);
    if (*verify) return cmd_verify(quick, verify_seed);
    if (*complexity) return cmd_complexity(cx_flags);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::fprintf(stderr, "{\"error\": \"%s\", \"kind\": \"usage\"}\n",
                 json_escape(e.what()).c_str());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "{\"error\": \"%s\", \"kind\": \"config\"}\n",
                 json_escape(e.what()).c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\": \"%s\", \"kind\": \"runtime\"}\n",
                 json_escape(e.what()).c_str());
    return 1;
  }
  return 0;
}
