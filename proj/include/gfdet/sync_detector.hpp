#pragma once

#include "gfdet/likelihood.hpp"

namespace gfdet {

/// The three scalars that determine a device's closed-form coordinate update.
struct CoordStatsSync {
  double alpha = 0.0;  // pbar^H Sigma^{-1} pbar
  double beta = 0.0;   // ||Ytilde^H Sigma^{-1} pbar||^2 / M
  double eta = 0.0;    // (2 sqrt(kappa)/M) Re(hbar^T Ytilde^H Sigma^{-1} pbar)
};

struct SyncResult {
  VectorXd a_hat;
  std::vector<double> objective_trace;  // value before iteration 1, then after each sweep
  int iterations = 0;
  bool converged = false;
};

CoordStatsSync coord_stats_sync(const MatrixXcd& sigma_inv, const MatrixXcd& ytilde,
                                const VectorXcd& pbar, const VectorXcd& hbar, double kappa);

/// Closed-form minimizer of the single-coordinate objective, clamped to
/// [-a_n, 1-a_n]. Falls back to the Rayleigh limit (beta - alpha)/alpha^2
/// when kappa * alpha < 1e-8, where the exact expression is 0/0-unstable.
double optimal_increment(const CoordStatsSync& s, double kappa, double a_n);

/// Objective change of moving one coordinate by d, given its stats; the 1-D
/// surrogate log(1 + alpha d) + (kappa alpha d^2 - (beta + eta) d)/(1 + alpha d).
double coordinate_objective_delta(const CoordStatsSync& s, double kappa, double d);

SyncResult run_sync(const DetectionInput& in, double epsilon = 1e-7, int max_iters = 1000);

}  // namespace gfdet
