#pragma once

#include <functional>
#include <vector>

#include "gfdet/async_detector.hpp"
#include "gfdet/config.hpp"
#include "gfdet/likelihood.hpp"

namespace gfdet {

/// Entrywise indicator a_hat >= theta (boundary inclusive).
VectorXi binarize(const VectorXd& a_hat, double theta);

/// Per-device mismatch rate (1/N) sum 1(a_bin != a_true).
double error_probability(const VectorXi& a_true, const VectorXi& a_bin);

struct TrialRecord {
  std::uint64_t seed = 0;
  int n_active = 0;
  VectorXi a_true;
  VectorXd a_hat;
  VectorXi t_true;
  VectorXi t_hat;
  VectorXd omega_true;
  VectorXd omega_hat;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::int64_t wall_time_ns = 0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<double> theta_grid;  // 0.01, 0.02, ..., 1.00
  std::vector<double> error_prob;
  std::vector<double> std_err;
  double theta_star = 0.0;  // smallest theta attaining the minimum
  double error_star = 0.0;
};

struct RunResult {
  std::vector<TrialRecord> trials;
  SweepResult sweep;
  std::uint64_t digest = 0;  // over detection outputs only, not wall times
  double median_iterations = 0.0;
  std::int64_t median_time_ns = 0;
  int n_failed = 0;
  Strategy strategy_used = Strategy::Direct;
  // STO side-metric: among true-active devices detected with a_hat >= 0.9,
  // the fraction whose time offset is recovered exactly (NaN when the case
  // has no STO or no device qualifies).
  double sto_exact_fraction = std::numeric_limits<double>::quiet_NaN();
  int sto_confident_devices = 0;
};

/// Monte Carlo evaluation: deterministic given the master seed, independent
/// of the thread count. Per-trial numeric failures are recorded; more than 5%
/// failures aborts.
RunResult run_trials(const RunConfig& cfg);

/// Exhaustive minimization over the a-grid x candidate set; the brute-force
/// oracle for the closed-form block updates.
struct BlockSearchResult {
  double a = 0.0;
  int x = 0;
  double value = 0.0;
};
BlockSearchResult oracle_block_search(const std::function<double(double, int)>& objective,
                                      int n_candidates, double a_step);

struct TimingPoint {
  Case kase = Case::Sync;
  int D = 0;
  double Omega = 0.0;
  int Q = 0;
  Strategy strategy = Strategy::Direct;
  std::int64_t median_time_ns = 0;
  double flops_model = 0.0;
  bool outputs_match = false;  // strategies agreed on every timed instance
};

/// Offset point for timing_compare.
struct OffsetPoint {
  int D = 0;
  double Omega = 0.0;
  int Q = 1;
};

/// Runs both strategies on identical instances per point and reports median
/// wall times (detector only; scenario generation excluded) plus the analytic
/// per-device flop model.
std::vector<TimingPoint> timing_compare(const RunConfig& base,
                                        const std::vector<OffsetPoint>& points,
                                        int trials_per_point = 5);

/// One trial's detection input, deterministic in (config, seed): fresh
/// pilots, LoS phases, activities, offsets, channels, and noise.
struct TrialData {
  DetectionInput input;
  Scenario scenario;
};
TrialData make_trial(const RunConfig& cfg, std::uint64_t trial_seed);

}  // namespace gfdet
