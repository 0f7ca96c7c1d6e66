#include "gfdet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <thread>

#include "gfdet/complexity.hpp"
#include "gfdet/sync_detector.hpp"

namespace gfdet {

VectorXi binarize(const VectorXd& a_hat, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("binarize: theta in (0,1]");
  return (a_hat.array() >= theta).cast<int>();
}

double error_probability(const VectorXi& a_true, const VectorXi& a_bin) {
  if (a_true.size() != a_bin.size())
    throw std::invalid_argument("error_probability: length mismatch");
  return (a_true.array() != a_bin.array()).cast<double>().mean();
}

TrialData make_trial(const RunConfig& cfg, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  TrialData td;
  td.input.kase = cfg.kase;
  td.input.params = cfg.params;
  td.input.pilots = gen_pilots(rng, cfg.params.L, cfg.params.N);
  td.input.stats = uniform_stats(gen_los(rng, cfg.params.M, cfg.params.N), 1.0, cfg.kappa);
  td.scenario = gen_scenario(rng, cfg.kase, cfg.params);
  td.scenario.seed = trial_seed;
  td.input.Y = synthesize_received(cfg.kase, cfg.params, td.input.pilots, td.input.stats,
                                   td.scenario)
                   .Y;
  return td;
}

namespace {

using clock_type = std::chrono::steady_clock;

TrialRecord run_one_trial(const RunConfig& cfg, const OffsetGrid& grid, Strategy strategy,
                          std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.seed = trial_seed;
  const TrialData td = make_trial(cfg, trial_seed);
  rec.a_true = td.scenario.a_true;
  rec.t_true = td.scenario.t_true;
  rec.omega_true = td.scenario.omega_true;
  rec.n_active = td.scenario.a_true.sum();
  try {
    const auto t0 = clock_type::now();
    if (cfg.kase == Case::Sync) {
      const SyncResult r = run_sync(td.input, cfg.epsilon, cfg.max_iters);
      rec.wall_time_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count();
      rec.a_hat = r.a_hat;
      rec.t_hat = VectorXi::Zero(cfg.params.N);
      rec.omega_hat = VectorXd::Zero(cfg.params.N);
      rec.objective = r.objective_trace.back();
      rec.iterations = r.iterations;
      rec.converged = r.converged;
    } else {
      const AsyncResult r = run_async(td.input, grid, strategy, cfg.epsilon, cfg.max_iters);
      rec.wall_time_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count();
      rec.a_hat = r.a_hat;
      rec.t_hat = r.t_hat;
      rec.omega_hat = r.omega_hat;
      rec.objective = r.objective_trace.back();
      rec.iterations = r.iterations;
      rec.converged = r.converged;
    }
  } catch (const numeric_error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

// Neumaier-compensated accumulation; keeps reductions stable and the digest
// independent of summation noise.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename Derived>
std::uint64_t hash_eigen(std::uint64_t h, const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto eval = m.eval();
  return fnv1a(h, eval.data(), sizeof(Scalar) * static_cast<std::size_t>(eval.size()));
}

SweepResult sweep_thresholds(const std::vector<TrialRecord>& trials) {
  SweepResult sw;
  const int n_theta = 100;
  sw.theta_grid.resize(n_theta);
  sw.error_prob.assign(n_theta, 0.0);
  sw.std_err.assign(n_theta, 0.0);
  for (int k = 0; k < n_theta; ++k) sw.theta_grid[static_cast<std::size_t>(k)] = (k + 1) / 100.0;

  std::vector<const TrialRecord*> ok;
  for (const auto& t : trials)
    if (!t.failed) ok.push_back(&t);
  const double n = static_cast<double>(ok.size());
  for (int k = 0; k < n_theta; ++k) {
    const double theta = sw.theta_grid[static_cast<std::size_t>(k)];
    CompensatedSum s1, s2;
    for (const TrialRecord* t : ok) {
      const double e = error_probability(t->a_true, binarize(t->a_hat, theta));
      s1.add(e);
      s2.add(e * e);
    }
    const double mean = s1.value() / n;
    sw.error_prob[static_cast<std::size_t>(k)] = mean;
    if (ok.size() > 1) {
      const double var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
      sw.std_err[static_cast<std::size_t>(k)] = std::sqrt(var / n);
    }
  }
  int best = 0;
  for (int k = 1; k < n_theta; ++k)
    if (sw.error_prob[static_cast<std::size_t>(k)] < sw.error_prob[static_cast<std::size_t>(best)])
      best = k;
  sw.theta_star = sw.theta_grid[static_cast<std::size_t>(best)];
  sw.error_star = sw.error_prob[static_cast<std::size_t>(best)];
  return sw;
}

}  // namespace

RunResult run_trials(const RunConfig& cfg) {
  cfg.validate();
  const Strategy strategy = cfg.resolve_strategy();
  const OffsetGrid grid =
      offset_grid(cfg.kase, cfg.params.D, cfg.params.Omega, cfg.params.Q);

  RunResult res;
  res.strategy_used = strategy;
  res.trials.resize(static_cast<std::size_t>(cfg.n_trials));

  const int n_workers = std::max(1, std::min(cfg.threads, cfg.n_trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.n_trials) break;
      const std::uint64_t seed = Rng::derive(cfg.master_seed, static_cast<std::uint64_t>(i));
      res.trials[static_cast<std::size_t>(i)] = run_one_trial(cfg, grid, strategy, seed);
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& t : res.trials)
    if (t.failed) ++res.n_failed;
  if (res.n_failed * 20 > cfg.n_trials) {
    std::string detail;
    for (const auto& t : res.trials)
      if (t.failed && detail.size() < 512)
        detail += "\n  seed " + std::to_string(t.seed) + ": " + t.error;
    throw numeric_error("more than 5% of trials failed (" + std::to_string(res.n_failed) + "/" +
                        std::to_string(cfg.n_trials) + ")" + detail);
  }

  res.sweep = sweep_thresholds(res.trials);

  if (has_sto(cfg.kase)) {
    int confident = 0, exact = 0;
    for (const auto& t : res.trials) {
      if (t.failed) continue;
      for (int n = 0; n < cfg.params.N; ++n)
        if (t.a_true[n] == 1 && t.a_hat[n] >= 0.9) {
          ++confident;
          if (t.t_hat[n] == t.t_true[n]) ++exact;
        }
    }
    res.sto_confident_devices = confident;
    if (confident > 0)
      res.sto_exact_fraction = static_cast<double>(exact) / confident;
  }

  // digest over detection outputs, in trial order
  std::uint64_t h = 1469598103934665603ULL;
  std::vector<double> iters;
  std::vector<std::int64_t> times;
  for (const auto& t : res.trials) {
    h = fnv1a(h, &t.seed, sizeof(t.seed));
    const unsigned char failed = t.failed ? 1 : 0;
    h = fnv1a(h, &failed, sizeof(failed));
    if (t.failed) continue;
    h = hash_eigen(h, t.a_hat);
    h = hash_eigen(h, t.t_hat);
    h = hash_eigen(h, t.omega_hat);
    h = fnv1a(h, &t.objective, sizeof(t.objective));
    h = fnv1a(h, &t.iterations, sizeof(t.iterations));
    iters.push_back(t.iterations);
    times.push_back(t.wall_time_ns);
  }
  res.digest = h;
  if (!iters.empty()) {
    const auto mid = iters.size() / 2;
    std::nth_element(iters.begin(), iters.begin() + static_cast<std::ptrdiff_t>(mid), iters.end());
    res.median_iterations = iters[mid];
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(mid), times.end());
    res.median_time_ns = times[mid];
  }
  return res;
}

BlockSearchResult oracle_block_search(const std::function<double(double, int)>& objective,
                                      int n_candidates, double a_step) {
  if (n_candidates < 1 || !(a_step > 0.0))
    throw std::invalid_argument("oracle_block_search: bad arguments");
  BlockSearchResult best;
  best.value = std::numeric_limits<double>::infinity();
  const int n_steps = static_cast<int>(std::llround(1.0 / a_step));
  for (int x = 0; x < n_candidates; ++x) {
    for (int i = 0; i <= n_steps; ++i) {
      const double a = std::min(1.0, i * a_step);
      const double v = objective(a, x);
      if (v < best.value) {
        best.value = v;
        best.a = a;
        best.x = x;
      }
    }
  }
  return best;
}

std::vector<TimingPoint> timing_compare(const RunConfig& base,
                                        const std::vector<OffsetPoint>& points,
                                        int trials_per_point) {
  std::vector<TimingPoint> out;
  for (const OffsetPoint& pt : points) {
    RunConfig cfg = base;
    cfg.params.D = pt.D;
    cfg.params.Omega = pt.Omega;
    cfg.params.Q = pt.Q;
    // degenerate points (e.g. case t at D = 0) are valid benchmark inputs;
    // the detector validates dimensions itself
    const OffsetGrid grid = offset_grid(cfg.kase, pt.D, pt.Omega, pt.Q);

    std::vector<std::int64_t> ns_direct, ns_fft;
    bool all_match = true;
    for (int i = 0; i < trials_per_point; ++i) {
      const std::uint64_t seed = Rng::derive(base.master_seed, 7000 + static_cast<std::uint64_t>(i));
      const TrialData td = make_trial(cfg, seed);
      const auto t0 = clock_type::now();
      const AsyncResult rd = run_async(td.input, grid, Strategy::Direct, cfg.epsilon,
                                       cfg.max_iters);
      const auto t1 = clock_type::now();
      const AsyncResult rf = run_async(td.input, grid, Strategy::Fft, cfg.epsilon,
                                       cfg.max_iters);
      const auto t2 = clock_type::now();
      ns_direct.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
      ns_fft.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count());
      if ((rd.a_hat - rf.a_hat).cwiseAbs().maxCoeff() > 1e-7 || rd.cand_hat != rf.cand_hat)
        all_match = false;
    }
    auto median = [](std::vector<std::int64_t> v) {
      const auto mid = v.size() / 2;
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
      return v[mid];
    };
    for (Strategy s : {Strategy::Direct, Strategy::Fft}) {
      TimingPoint tp;
      tp.kase = cfg.kase;
      tp.D = pt.D;
      tp.Omega = pt.Omega;
      tp.Q = pt.Q;
      tp.strategy = s;
      tp.median_time_ns = s == Strategy::Direct ? median(ns_direct) : median(ns_fft);
      tp.flops_model =
          s == Strategy::Direct
              ? flops_direct_per_device(cfg.kase, cfg.params.L, cfg.params.M, pt.D, pt.Omega, pt.Q)
              : flops_fft_per_device(cfg.kase, cfg.params.L, cfg.params.M, pt.D, pt.Omega, pt.Q);
      tp.outputs_match = all_match;
      out.push_back(tp);
    }
  }
  return out;
}

}  // namespace gfdet
