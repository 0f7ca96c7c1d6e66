#pragma once

#include "gfdet/fft_kernels.hpp"
#include "gfdet/likelihood.hpp"
#include "gfdet/sync_detector.hpp"

namespace gfdet {

/// (alpha, beta, eta) per grid candidate, flat layout (STO slow, CFO fast).
struct CandidateStats {
  ArrayXd alpha;
  ArrayXd beta;
  ArrayXd eta;
};

/// Closed-form block update: per-candidate increment d(x), score h(x),
/// minimizing candidate, and the new activity value.
struct BlockUpdate {
  double a_star = 0.0;
  int x_star = 0;
  ArrayXd d;
  ArrayXd h;
};

struct AsyncResult {
  VectorXd a_hat;
  VectorXi cand_hat;    // flat grid candidate per device
  VectorXi t_hat;       // STO estimate per device
  VectorXd omega_hat;   // CFO estimate (wrapped grid value) per device
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  Strategy strategy_used = Strategy::Direct;
};

/// Definitional per-candidate statistics from the leave-one-out matrices.
CandidateStats candidate_stats_direct(const LeaveOneOut& loo, int n, const OffsetGrid& grid,
                                      const PilotCache& cache, double kappa,
                                      const VectorXcd& hbar, int M);

/// FFT-strategy statistics via the equivalent forms; one-shot convenience
/// around FftStatsEngine for checks (detectors keep a persistent engine).
CandidateStats candidate_stats_fft(Case c, const SystemParams& params, const OffsetGrid& grid,
                                   const PilotCache& cache, const LeaveOneOut& loo, int n,
                                   double kappa);

/// Closed-form optimum of the block problem; ties in the h argmin break to the
/// smallest flat candidate index.
BlockUpdate block_update(const CandidateStats& stats, double kappa);

AsyncResult run_async(const DetectionInput& in, const OffsetGrid& grid, Strategy strategy,
                      double epsilon = 1e-7, int max_iters = 1000);

}  // namespace gfdet
