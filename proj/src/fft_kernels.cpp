#include "gfdet/fft_kernels.hpp"

namespace gfdet {

MatrixXcd psi(const MatrixXcd& B) {
  if (B.rows() != B.cols()) throw std::invalid_argument("psi: matrix must be square");
  const Eigen::Index K = B.rows();
  MatrixXcd P = MatrixXcd::Zero(K, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = 0; l + k < K; ++l) P(l, k) = B(l, l + k);
  P.col(0) *= M_SQRT1_2;
  return P;
}

MatrixXcd xi(Case c, const MatrixXcd& X, const VectorXcd& p) {
  const int K = static_cast<int>(X.rows());
  if (p.size() != K) throw std::invalid_argument("xi: dimension mismatch");
  MatrixXcd a = psi(X);
  MatrixXcd b = psi(p.conjugate() * p.transpose());
  if (c != Case::F) {
    const Fft fft(K);
    fft.inverse_cols(a);  // U^H x = K IFFT(x)
    a *= static_cast<double>(K);
    fft.forward_cols(b);
  }
  return a.cwiseProduct(b);
}

ToneSpec make_tone_spec(int Q, int L_i) {
  if (Q < 1 || L_i < 1) throw std::invalid_argument("make_tone_spec: Q and L_i must be positive");
  ToneSpec s;
  s.Q = Q;
  s.cols = L_i;
  s.stride = (L_i + Q - 1) / Q;
  s.padded = Q * s.stride;
  s.q_below_dim = Q < L_i;
  return s;
}

MatrixXcd tone_multiply(const ToneSpec& spec, const MatrixXcd& bcols) {
  if (bcols.rows() != spec.cols) throw std::invalid_argument("tone_multiply: row mismatch");
  const Fft fft(spec.padded);
  MatrixXcd out(spec.Q, bcols.cols());
  VectorXcd buf(spec.padded);
  for (Eigen::Index c = 0; c < bcols.cols(); ++c) {
    buf.setZero();
    buf.head(spec.cols) = bcols.col(c);
    fft.inverse_inplace(buf.data());
    for (int q = 0; q < spec.Q; ++q)
      out(q, c) = static_cast<double>(spec.padded) * buf[q * spec.stride];
  }
  return out;
}

MatrixXcd explicit_tone_matrix(int Q, int L_i) {
  MatrixXcd T(Q, L_i);
  for (int q = 0; q < Q; ++q) T.row(q) = tau(q * 2.0 * M_PI / Q, L_i).transpose();
  return T;
}

// ---------------------------------------------------------------------------

FftStatsEngine::FftStatsEngine(Case c, const SystemParams& params, const OffsetGrid& grid,
                               const PilotCache& cache)
    : case_(c), rows_(params.signal_rows(c)), M_(params.M), n_sto_(grid.n_sto()),
      cache_(&cache) {
  if (c == Case::Sync) throw std::invalid_argument("FftStatsEngine: asynchronous cases only");
  for (const CfoCandidate& cc : grid.cfo) cfo_rows_.push_back(cc.q - 1);
  if (c != Case::F) fft_rows_.emplace(rows_);
  if (has_cfo(c)) {
    tone_ = make_tone_spec(params.Q, rows_);
    fft_pad_.emplace(tone_.padded);
  }
  const int N = params.N;
  pilot_spec_.reserve(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const VectorXcd u = cache.base().col(n);
    MatrixXcd spec_n = psi(u.conjugate() * u.transpose());
    if (c != Case::F) fft_rows_->forward_cols(spec_n);
    pilot_spec_.push_back(std::move(spec_n));
  }
  if (c == Case::T) {
    pilot_fft_.reserve(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) pilot_fft_.push_back(fft_rows_->forward(cache.base().col(n)));
  }
  work_psi_.resize(rows_, rows_);
  work_vec_.resize(rows_);
  if (fft_pad_) work_pad_.resize(tone_.padded);
}

VectorXcd FftStatsEngine::tone_rows(const VectorXcd& col) {
  work_pad_.setZero();
  work_pad_.head(rows_) = col;
  fft_pad_->inverse_inplace(work_pad_.data());
  VectorXcd out(tone_.Q);
  for (int q = 0; q < tone_.Q; ++q)
    out[q] = static_cast<double>(tone_.padded) * work_pad_[q * tone_.stride];
  return out;
}

MatrixXcd FftStatsEngine::tone_rows_cols(const MatrixXcd& mat) {
  MatrixXcd out(tone_.Q, mat.cols());
  for (Eigen::Index c = 0; c < mat.cols(); ++c) out.col(c) = tone_rows(mat.col(c));
  return out;
}

void FftStatsEngine::compute(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha,
                             ArrayXd& beta, ArrayXd& eta) {
  switch (case_) {
    case Case::T: compute_t(loo, n, kappa, alpha, beta, eta); return;
    case Case::F: compute_f(loo, n, kappa, alpha, beta, eta); return;
    case Case::TF: compute_tf(loo, n, kappa, alpha, beta, eta); return;
    default: throw std::invalid_argument("FftStatsEngine: asynchronous cases only");
  }
}

void FftStatsEngine::compute_t(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha,
                               ArrayXd& beta, ArrayXd& eta) {
  const int nd = n_sto_;
  alpha.resize(nd);
  beta.resize(nd);
  eta.resize(nd);
  const auto& bp = pilot_spec_[static_cast<std::size_t>(n)];

  // alpha / beta: FFT(rowsum(IFFTcols(Psi(B)) o F Psi(u u^T))) gathered at {0..D}
  auto quad_stats = [&](const MatrixXcd& B, ArrayXd& out, double scale) {
    work_psi_ = psi(B);
    fft_rows_->inverse_cols(work_psi_);
    work_psi_.array() *= bp.array();
    work_vec_ = work_psi_.rowwise().sum();
    fft_rows_->forward_inplace(work_vec_.data());
    for (int t = 0; t < nd; ++t) out[t] = scale * work_vec_[t].real();
  };
  quad_stats(loo.sigma_inv, alpha, 2.0);
  quad_stats(loo.phi, beta, 2.0 / M_);

  // eta: FFT(IFFT(u_vec) o F u) with u_vec = (hbar^T Ytilde^H Sigma^{-1})^T
  work_vec_ = loo.phi_vec.conjugate();
  fft_rows_->inverse_inplace(work_vec_.data());
  work_vec_.array() *= pilot_fft_[static_cast<std::size_t>(n)].array();
  fft_rows_->forward_inplace(work_vec_.data());
  const double es = 2.0 * std::sqrt(kappa) / M_;
  for (int t = 0; t < nd; ++t) eta[t] = es * work_vec_[t].real();
}

void FftStatsEngine::compute_f(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha,
                               ArrayXd& beta, ArrayXd& eta) {
  const int nq = static_cast<int>(cfo_rows_.size());
  alpha.resize(nq);
  beta.resize(nq);
  eta.resize(nq);
  const auto& pp = pilot_spec_[static_cast<std::size_t>(n)];

  auto quad_stats = [&](const MatrixXcd& B, ArrayXd& out, double scale) {
    work_psi_ = psi(B);
    work_psi_.array() *= pp.array();
    work_vec_ = work_psi_.colwise().sum().transpose();
    const VectorXcd tm = tone_rows(work_vec_);
    for (int qi = 0; qi < nq; ++qi) out[qi] = scale * tm[cfo_rows_[static_cast<std::size_t>(qi)]].real();
  };
  quad_stats(loo.sigma_inv, alpha, 2.0);
  quad_stats(loo.phi, beta, 2.0 / M_);

  work_vec_ = loo.phi_vec.conjugate().cwiseProduct(cache_->base().col(n));
  const VectorXcd tm = tone_rows(work_vec_);
  const double es = 2.0 * std::sqrt(kappa) / M_;
  for (int qi = 0; qi < nq; ++qi) eta[qi] = es * tm[cfo_rows_[static_cast<std::size_t>(qi)]].real();
}

void FftStatsEngine::compute_tf(const LeaveOneOut& loo, int n, double kappa, ArrayXd& alpha,
                                ArrayXd& beta, ArrayXd& eta) {
  const int nd = n_sto_;
  const int nq = static_cast<int>(cfo_rows_.size());
  alpha.resize(nd * nq);
  beta.resize(nd * nq);
  eta.resize(nd * nq);
  const auto& bp = pilot_spec_[static_cast<std::size_t>(n)];
  const int L = cache_->pilot_len();

  // Row restriction to {0..D} happens before the tone product, keeping the
  // padded IFFT batch at D+1 columns.
  auto quad_stats = [&](const MatrixXcd& B, ArrayXd& out, double scale) {
    work_psi_ = psi(B);
    fft_rows_->inverse_cols(work_psi_);
    work_psi_.array() *= bp.array();
    fft_rows_->forward_cols(work_psi_);
    const MatrixXcd gd = work_psi_.topRows(nd).transpose();  // L_i x (D+1)
    const MatrixXcd tm = tone_rows_cols(gd);                 // Q x (D+1)
    for (int t = 0; t < nd; ++t)
      for (int qi = 0; qi < nq; ++qi)
        out[t * nq + qi] = scale * tm(cfo_rows_[static_cast<std::size_t>(qi)], t).real();
  };
  quad_stats(loo.sigma_inv, alpha, 2.0);
  quad_stats(loo.phi, beta, 2.0 / M_);

  // eta: columns t of (u_vec o u(t, 0)) stacked, then the tone product.
  const VectorXcd u_vec = loo.phi_vec.conjugate();
  const auto& base = cache_->base().col(n);
  MatrixXcd shifted = MatrixXcd::Zero(rows_, nd);
  for (int t = 0; t < nd; ++t)
    shifted.col(t).segment(t, L) = u_vec.segment(t, L).cwiseProduct(base.head(L));
  const MatrixXcd tm = tone_rows_cols(shifted);
  const double es = 2.0 * std::sqrt(kappa) / M_;
  for (int t = 0; t < nd; ++t)
    for (int qi = 0; qi < nq; ++qi)
      eta[t * nq + qi] = es * tm(cfo_rows_[static_cast<std::size_t>(qi)], t).real();
}

}  // namespace gfdet
