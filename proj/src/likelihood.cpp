#include "gfdet/likelihood.hpp"

#include <Eigen/Cholesky>

namespace gfdet {

// Dimension agreement only; the config layer owns the strict per-case offset
// invariants, and tests exercise degenerate reductions (e.g. TF with D = 0).
void DetectionInput::validate() const {
  if (params.N < 1 || params.M < 1 || params.L < 1 || params.D < 0)
    throw std::invalid_argument("bad system dimensions");
  if (params.noise_var <= 0.0) throw std::invalid_argument("noise_var must be positive");
  stats.validate();
  if (pilots.P.rows() != params.L || pilots.P.cols() != params.N)
    throw std::invalid_argument("pilot book dimension mismatch");
  if (stats.devices() != params.N || stats.antennas() != params.M)
    throw std::invalid_argument("channel statistics dimension mismatch");
  if (Y.rows() != params.signal_rows(kase) || Y.cols() != params.M)
    throw std::invalid_argument("received signal dimension mismatch");
}

namespace {

struct DenseModel {
  MatrixXcd sigma;
  MatrixXcd ybar;
};

DenseModel build_dense(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                       const VectorXd& omega) {
  const MatrixXcd Pi = equivalent_pilot_matrix(in.kase, in.pilots, t, omega, in.params.D);
  const ArrayXd gamma = in.stats.gamma();
  const ArrayXd w_cov = a.array() * gamma;
  const ArrayXd w_mean = a.array() * (gamma * in.stats.kappa.array()).sqrt();
  DenseModel m;
  m.sigma = Pi * w_cov.matrix().asDiagonal() * Pi.adjoint();
  m.sigma += in.params.noise_var * MatrixXcd::Identity(Pi.rows(), Pi.rows());
  m.ybar = Pi * w_mean.matrix().asDiagonal() * in.stats.Hbar.transpose();
  return m;
}

double logdet_from_llt(const Eigen::LLT<MatrixXcd>& llt) {
  double s = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
  return 2.0 * s;
}

Eigen::LLT<MatrixXcd> factor_or_throw(const MatrixXcd& sigma) {
  Eigen::LLT<MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw numeric_error("covariance not positive definite");
  return llt;
}

double trace_quad(const Eigen::LLT<MatrixXcd>& llt, const MatrixXcd& lhs, const MatrixXcd& rhs) {
  // tr(Sigma^{-1} lhs rhs^H) = sum of conj(rhs) .* (Sigma^{-1} lhs)
  return rhs.conjugate().cwiseProduct(llt.solve(lhs)).sum().real();
}

}  // namespace

MatrixXcd covariance_dense(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                           const VectorXd& omega) {
  return build_dense(in, a, t, omega).sigma;
}

MatrixXcd mean_dense(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                     const VectorXd& omega) {
  return build_dense(in, a, t, omega).ybar;
}

double negloglik(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                 const VectorXd& omega) {
  const DenseModel m = build_dense(in, a, t, omega);
  const auto llt = factor_or_throw(m.sigma);
  const MatrixXcd ytilde = in.Y - m.ybar;
  return logdet_from_llt(llt) + trace_quad(llt, ytilde, ytilde) / in.params.M;
}

double rayleigh_negloglik(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                          const VectorXd& omega) {
  const DenseModel m = build_dense(in, a, t, omega);
  const auto llt = factor_or_throw(m.sigma);
  return in.params.M * logdet_from_llt(llt) + trace_quad(llt, in.Y, in.Y);
}

double los_term(const DetectionInput& in, const VectorXd& a, const VectorXi& t,
                const VectorXd& omega) {
  const DenseModel m = build_dense(in, a, t, omega);
  const auto llt = factor_or_throw(m.sigma);
  const double M = in.params.M;
  return trace_quad(llt, m.ybar, m.ybar) / M - 2.0 * trace_quad(llt, in.Y, m.ybar) / M;
}

// ---------------------------------------------------------------------------

PilotCache::PilotCache(Case c, const SystemParams& params, const PilotBook& pilots,
                       const ChannelStatistics& stats, const OffsetGrid& grid)
    : L_(params.L), has_cfo_(has_cfo(c)) {
  const int rows = params.signal_rows(c);
  const int N = params.N;
  base_ = MatrixXcd::Zero(rows, N);
  const ArrayXd scale = stats.gamma().sqrt();
  for (int n = 0; n < N; ++n) base_.col(n).head(L_) = scale[n] * pilots.P.col(n);
  tau_table_.resize(rows, grid.n_cfo());
  for (int qi = 0; qi < grid.n_cfo(); ++qi)
    tau_table_.col(qi) = tau(grid.cfo[static_cast<std::size_t>(qi)].omega, rows);
}

VectorXcd PilotCache::candidate(int n, const OffsetGrid& grid, int flat) const {
  const int nc = grid.n_cfo();
  const int tpos = flat / nc;
  const int qpos = flat % nc;
  const int rows = static_cast<int>(base_.rows());
  VectorXcd out = VectorXcd::Zero(rows);
  const int t = grid.sto[static_cast<std::size_t>(tpos)];
  out.segment(t, L_) = base_.col(n).head(L_);
  if (has_cfo_)
    out.segment(t, L_).array() *= tau_table_.col(qpos).segment(t, L_).array();
  return out;
}

// ---------------------------------------------------------------------------

RankOne rank_one_prep(const MatrixXcd& sigma_inv, const VectorXcd& pbar) {
  RankOne r;
  r.c.noalias() = sigma_inv * pbar;
  r.quad = pbar.dot(r.c).real();  // Eigen dot conjugates the left operand
  return r;
}

void apply_inverse_update(MatrixXcd& sigma_inv, const RankOne& r, double weight) {
  if (weight == 0.0) return;
  const double denom = 1.0 + weight * r.quad;
  if (std::abs(denom) < 1e-14)
    throw numeric_error("singular rank-one inverse update");
  sigma_inv.noalias() -= (weight / denom) * (r.c * r.c.adjoint());
}

MatrixXcd add_device_inverse(const MatrixXcd& sigma_inv, const VectorXcd& pbar, double weight) {
  MatrixXcd out = sigma_inv;
  if (weight != 0.0) {
    apply_inverse_update(out, rank_one_prep(sigma_inv, pbar), weight);
    symmetrize(out);
  }
  return out;
}

void update_ytilde(MatrixXcd& ytilde, const VectorXcd& pbar, double kappa, double delta_a,
                   const VectorXcd& hbar) {
  if (delta_a == 0.0 || kappa == 0.0) return;
  ytilde.noalias() -= (delta_a * std::sqrt(kappa)) * pbar * hbar.transpose();
}

void symmetrize(MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = cxd(m(j, j).real(), 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const cxd v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
}

DetectorState init_state(const DetectionInput& in, bool with_phi) {
  DetectorState st;
  st.kase = in.kase;
  const int rows = in.params.signal_rows(in.kase);
  const double s2 = in.params.noise_var;
  st.a = VectorXd::Zero(in.params.N);
  st.cand = VectorXi::Zero(in.params.N);
  st.sigma_inv = MatrixXcd::Identity(rows, rows) / s2;
  st.ytilde = in.Y;
  if (with_phi) st.phi = (in.Y * in.Y.adjoint()) / (s2 * s2);
  st.objective = rows * std::log(s2) + in.Y.squaredNorm() / (in.params.M * s2);
  return st;
}

namespace {

// Phi after a rank-one change of the mean: Phi + da sqrt(kappa) (c v^H + v c^H)
// + da^2 M kappa c c^H, then the Sherman-Morrison congruence through s = D pbar.
void phi_transition(MatrixXcd& phi, const RankOne& r, const VectorXcd& pbar,
                    const VectorXcd& mean_vec, double a, double kappa, int M,
                    double mean_sign, double sm_weight) {
  if (a != 0.0 && kappa != 0.0) {
    const double w1 = mean_sign * a * std::sqrt(kappa);
    phi.noalias() += w1 * (r.c * mean_vec.adjoint());
    phi.noalias() += w1 * (mean_vec * r.c.adjoint());
    phi.noalias() += (a * a * M * kappa) * (r.c * r.c.adjoint());
  }
  if (a != 0.0) {
    const double denom = 1.0 + sm_weight * r.quad;
    if (std::abs(denom) < 1e-14)
      throw numeric_error("singular rank-one inverse update");
    const double w = -sm_weight / denom;
    const VectorXcd s = phi * pbar;
    phi.noalias() += w * (r.c * s.adjoint());
    phi.noalias() += w * (s * r.c.adjoint());
    phi.noalias() += (w * w * pbar.dot(s).real()) * (r.c * r.c.adjoint());
  }
  symmetrize(phi);
}

}  // namespace

void remove_device(const DetectorState& state, int n, const VectorXcd& pbar_cur, double kappa,
                   const VectorXcd& hbar, int M, LeaveOneOut& out) {
  const double a = state.a[n];
  out.sigma_inv = state.sigma_inv;
  out.ytilde = state.ytilde;
  if (state.has_phi()) out.phi = state.phi;
  if (a != 0.0) {
    const RankOne r = rank_one_prep(state.sigma_inv, pbar_cur);
    apply_inverse_update(out.sigma_inv, r, -a);
    symmetrize(out.sigma_inv);
    update_ytilde(out.ytilde, pbar_cur, kappa, -a, hbar);
    if (state.has_phi()) {
      const VectorXcd varphi = state.sigma_inv * (state.ytilde * hbar.conjugate());
      phi_transition(out.phi, r, pbar_cur, varphi, a, kappa, M, +1.0, -a);
    }
  }
  if (state.has_phi()) out.phi_vec = out.sigma_inv * (out.ytilde * hbar.conjugate());
}

void restore_device(DetectorState& state, const LeaveOneOut& loo, int n, double a_new,
                    int cand_new, const VectorXcd& pbar_new, double kappa,
                    const VectorXcd& hbar, int M) {
  state.a[n] = a_new;
  state.cand[n] = cand_new;
  state.sigma_inv = loo.sigma_inv;
  state.ytilde = loo.ytilde;
  if (state.has_phi()) state.phi = loo.phi;
  if (a_new == 0.0) return;
  const RankOne r = rank_one_prep(loo.sigma_inv, pbar_new);
  apply_inverse_update(state.sigma_inv, r, a_new);
  symmetrize(state.sigma_inv);
  update_ytilde(state.ytilde, pbar_new, kappa, a_new, hbar);
  if (state.has_phi())
    phi_transition(state.phi, r, pbar_new, loo.phi_vec, a_new, kappa, M, -1.0, a_new);
}

}  // namespace gfdet
