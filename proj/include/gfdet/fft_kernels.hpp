#pragma once

#include <optional>
#include <vector>

#include "gfdet/fft.hpp"
#include "gfdet/likelihood.hpp"

namespace gfdet {

/// Column k holds the (k-1)-th superdiagonal of B zero-padded to full length;
/// the main-diagonal column is scaled by sqrt(2)/2 so that the 2 Re(...)
/// aggregation counts it once.
MatrixXcd psi(const MatrixXcd& B);

/// Xi_i(X, p) = (U_i^H Psi(X)) o (U_i Psi(p* p^T)), where U_i is the DFT
/// matrix for the STO cases and the identity for the CFO-only case. The U_i
/// products are realized by column-wise FFT/IFFT.
MatrixXcd xi(Case c, const MatrixXcd& X, const VectorXcd& p);

/// Row-sampled submatrix view of the padded IDFT matrix that realizes the
/// tone matrix T_i (rows tau(omega^(q))^T, q = 1..Q).
struct ToneSpec {
  int Q = 0;
  int cols = 0;        // L_i
  int padded = 0;      // Q ceil(L_i / Q)
  int stride = 0;      // ceil(L_i / Q)
  bool q_below_dim = false;
};

ToneSpec make_tone_spec(int Q, int L_i);

/// T_i * Bcols via zero-padded IFFT per column; equals the direct product.
MatrixXcd tone_multiply(const ToneSpec& spec, const MatrixXcd& bcols);

/// Explicitly built T_i; reference path for tone_multiply.
MatrixXcd explicit_tone_matrix(int Q, int L_i);

/// Computes the per-candidate (alpha, beta, eta) arrays through the
/// circulant/tone reformulation: all candidates of a device at once, every
/// DFT/IDFT product realized by FFT/IFFT and tone products by padded IFFT.
/// Produces the same values as the direct per-candidate evaluation.
class FftStatsEngine {
 public:
  FftStatsEngine(Case c, const SystemParams& params, const OffsetGrid& grid,
                 const PilotCache& cache);

  /// Fills flat candidate arrays (layout: STO slow, CFO grid index fast).
  /// loo.phi and loo.phi_vec must be populated.
  void compute(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha, ArrayXd& beta,
               ArrayXd& eta);

  const ToneSpec& tone_spec() const { return tone_; }

 private:
  void compute_t(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha, ArrayXd& beta,
                 ArrayXd& eta);
  void compute_f(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha, ArrayXd& beta,
                 ArrayXd& eta);
  void compute_tf(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha, ArrayXd& beta,
                  ArrayXd& eta);

  VectorXcd tone_rows(const VectorXcd& col);       // gathered tone product of one column
  MatrixXcd tone_rows_cols(const MatrixXcd& mat);  // per-column tone product, Q x R

  Case case_;
  int rows_ = 0;  // L_i
  int M_ = 0;
  int n_sto_ = 0;
  std::vector<int> cfo_rows_;  // 0-based tone row per kept CFO candidate (q - 1)
  const PilotCache* cache_ = nullptr;

  std::optional<Fft> fft_rows_;
  std::optional<Fft> fft_pad_;
  ToneSpec tone_;

  std::vector<MatrixXcd> pilot_spec_;  // F Psi(u* u^T) for STO cases, Psi(u* u^T) for F
  std::vector<VectorXcd> pilot_fft_;   // F u, case T only

  // step workspaces
  MatrixXcd work_psi_;
  VectorXcd work_vec_;
  VectorXcd work_pad_;
};

}  // namespace gfdet
