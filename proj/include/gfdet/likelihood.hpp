#pragma once

#include "gfdet/model.hpp"
#include "gfdet/types.hpp"

namespace gfdet {

/// One detection problem instance: model knowns plus the received signal.
struct DetectionInput {
  Case kase = Case::Sync;
  SystemParams params;
  PilotBook pilots;
  ChannelStatistics stats;
  MatrixXcd Y;  // L_i x M

  void validate() const;
};

// ---------------------------------------------------------------------------
// Dense oracle path. These rebuild Sigma, Ybar from scratch and never touch
// incremental state, so they can check it.
// ---------------------------------------------------------------------------

/// Sigma(a, x) = P_i(x) diag(a_n g_n/(1+kappa_n)) P_i(x)^H + sigma^2 I.
MatrixXcd covariance_dense(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                           const VectorXd& omega);

/// Ybar(a, x) = P_i(x) diag(a_n sqrt(gamma_n kappa_n)) Hbar^T.
MatrixXcd mean_dense(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                     const VectorXd& omega);

/// f = log|Sigma| + (1/M) tr(Sigma^{-1} Ytilde Ytilde^H), via Cholesky.
double negloglik(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                 const VectorXd& omega);

/// f_Ray = M log|Sigma| + tr(Sigma^{-1} Y Y^H): the Rayleigh objective at
/// large-scale powers g_n/(1+kappa_n).
double rayleigh_negloglik(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                          const VectorXd& omega);

/// Delta = (1/M) tr(Sigma^{-1} Ybar Ybar^H) - (2/M) Re tr(Sigma^{-1} Y Ybar^H),
/// the LoS-only term; f = f_Ray / M + Delta.
double los_term(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                const VectorXd& omega);

// ---------------------------------------------------------------------------
// Scaled pilots.
// ---------------------------------------------------------------------------

/// Caches pbar_n = sqrt(g_n/(1+kappa_n)) p_n zero-padded to L_i, plus the
/// phase-ramp table, and materializes per-candidate equivalent pilots.
class PilotCache {
 public:
  PilotCache(Case c, const SystemParams& params, const PilotBook& pilots,
             const ChannelStatistics& stats, const OffsetGrid& grid);

  int rows() const { return static_cast<int>(base_.rows()); }
  int pilot_len() const { return L_; }

  /// Scaled pilot at zero offset.
  const MatrixXcd& base() const { return base_; }
  VectorXcd base_col(int n) const { return base_.col(n); }

  /// Scaled equivalent pilot pbar_{i,n}(x) for a flat grid candidate.
  VectorXcd candidate(int n, const OffsetGrid& grid, int flat) const;

  /// Phase ramp for CFO grid position (column of the tau table).
  const MatrixXcd& tau_table() const { return tau_table_; }

 private:
  MatrixXcd base_;       // L_i x N
  MatrixXcd tau_table_;  // L_i x n_cfo
  int L_ = 0;
  bool has_cfo_ = false;
};

// ---------------------------------------------------------------------------
// Incremental state and rank-one algebra.
// ---------------------------------------------------------------------------

/// Intermediate of a Sherman-Morrison step: c = Sigma^{-1} pbar and the
/// quadratic form pbar^H c.
struct RankOne {
  VectorXcd c;
  double quad = 0.0;
};

RankOne rank_one_prep(const MatrixXcd& sigma_inv, const VectorXcd& pbar);

/// In place (Sigma + weight pbar pbar^H)^{-1} given Sigma^{-1} and the prep.
/// Throws numeric_error when |1 + weight quad| < 1e-14.
void apply_inverse_update(MatrixXcd& sigma_inv, const RankOne& r, double weight);

/// Convenience form of the above; output re-symmetrized.
MatrixXcd add_device_inverse(const MatrixXcd& sigma_inv, const VectorXcd& pbar, double weight);

/// Ytilde' = Ytilde - delta_a sqrt(kappa) pbar hbar^T.
void update_ytilde(MatrixXcd& ytilde, const VectorXcd& pbar, double kappa, double delta_a,
                   const VectorXcd& hbar);

/// Averages a matrix with its conjugate transpose to bound Hermitian drift.
void symmetrize(MatrixXcd& m);

/// Mutable detector state: relaxed activities, per-device grid candidates,
/// Sigma^{-1}, Ytilde, optionally Phi = Sigma^{-1} Ytilde Ytilde^H Sigma^{-1},
/// and the running objective.
struct DetectorState {
  Case kase = Case::Sync;
  VectorXd a;
  VectorXi cand;
  MatrixXcd sigma_inv;
  MatrixXcd ytilde;
  MatrixXcd phi;  // empty unless the detector maintains it
  double objective = 0.0;

  bool has_phi() const { return phi.size() != 0; }
};

/// State at a = 0: Sigma^{-1} = I/sigma^2, Ytilde = Y, Phi = Y Y^H / sigma^4,
/// objective L_i log sigma^2 + ||Y||_F^2 / (M sigma^2).
DetectorState init_state(const DetectionInput& in, bool with_phi);

/// Matrices with one device's contribution removed (its a_n treated as 0).
struct LeaveOneOut {
  MatrixXcd sigma_inv;
  MatrixXcd ytilde;
  MatrixXcd phi;
  VectorXcd phi_vec;  // Sigma_loo^{-1} (Ytilde_loo hbar_n^*), kept for the restore step
};

/// Computes the leave-one-out views for device n from the current state.
/// pbar_cur must be the scaled pilot at the device's current candidate.
void remove_device(const DetectorState& state, int n, const VectorXcd& pbar_cur, double kappa,
                   const VectorXcd& hbar, int M, LeaveOneOut& out);

/// Re-inserts device n with new (a, candidate); writes the updated matrices
/// back into the state. pbar_new must match cand_new.
void restore_device(DetectorState& state, const LeaveOneOut& loo, int n, double a_new,
                    int cand_new, const VectorXcd& pbar_new, double kappa,
                    const VectorXcd& hbar, int M);

}  // namespace gfdet
