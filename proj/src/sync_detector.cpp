#include "gfdet/sync_detector.hpp"

namespace gfdet {

CoordStatsSync coord_stats_sync(const MatrixXcd& sigma_inv, const MatrixXcd& ytilde,
                                const VectorXcd& pbar, const VectorXcd& hbar, double kappa) {
  const int M = static_cast<int>(ytilde.cols());
  const VectorXcd c = sigma_inv * pbar;
  const VectorXcd d = ytilde.adjoint() * c;
  CoordStatsSync s;
  s.alpha = pbar.dot(c).real();
  s.beta = d.squaredNorm() / M;
  s.eta = 2.0 * std::sqrt(kappa) / M * (hbar.transpose() * d).value().real();
  return s;
}

double optimal_increment(const CoordStatsSync& s, double kappa, double a_n) {
  if (!(s.alpha > 0.0)) throw std::invalid_argument("optimal_increment: alpha must be positive");
  const double lo = -a_n;
  const double hi = 1.0 - a_n;
  if (kappa * s.alpha < 1e-8) {
    // Rayleigh limit of the increment; the exact form below degenerates to 0/0.
    const double d = (s.beta - s.alpha) / (s.alpha * s.alpha);
    return std::clamp(d, lo, hi);
  }
  const double disc =
      4.0 * kappa * (kappa + s.beta + s.eta) + s.alpha * s.alpha;
  if (disc <= 0.0) return lo;
  const double d = (-s.alpha - 2.0 * kappa + std::sqrt(disc)) / (2.0 * kappa * s.alpha);
  return std::clamp(d, lo, hi);
}

double coordinate_objective_delta(const CoordStatsSync& s, double kappa, double d) {
  if (d == 0.0) return 0.0;
  const double one_ad = 1.0 + s.alpha * d;
  // domain boundary: the covariance loses positive definiteness at d = -1/alpha
  if (one_ad <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(one_ad) + (kappa * s.alpha * d * d - (s.beta + s.eta) * d) / one_ad;
}

SyncResult run_sync(const DetectionInput& in, double epsilon, int max_iters) {
  in.validate();
  if (!(epsilon > 0.0)) throw std::invalid_argument("run_sync: epsilon must be positive");
  const int N = in.params.N;
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, in.params, in.pilots, in.stats, grid);

  DetectorState st = init_state(in, /*with_phi=*/false);
  SyncResult res;
  res.objective_trace.push_back(st.objective);

  VectorXcd c, dvec;
  for (int iter = 1; iter <= max_iters; ++iter) {
    const double f_last = st.objective;
    for (int n = 0; n < N; ++n) {
      const auto pbar = cache.base().col(n);
      const double kappa = in.stats.kappa[n];
      c.noalias() = st.sigma_inv * pbar;
      dvec.noalias() = st.ytilde.adjoint() * c;
      CoordStatsSync s;
      s.alpha = pbar.dot(c).real();
      s.beta = dvec.squaredNorm() / in.params.M;
      s.eta = 2.0 * std::sqrt(kappa) / in.params.M *
              (in.stats.Hbar.col(n).transpose() * dvec).value().real();
      const double d = optimal_increment(s, kappa, st.a[n]);
      if (d != 0.0) {
        const double denom = 1.0 + d * s.alpha;
        if (std::abs(denom) < 1e-14) throw numeric_error("singular rank-one inverse update");
        st.sigma_inv.noalias() -= (d / denom) * (c * c.adjoint());
        symmetrize(st.sigma_inv);
        update_ytilde(st.ytilde, pbar, kappa, d, in.stats.Hbar.col(n));
        st.a[n] += d;
      }
      st.objective += coordinate_objective_delta(s, kappa, d);
    }
    if (!std::isfinite(st.objective))
      throw numeric_error("non-finite objective at iteration " + std::to_string(iter));
    res.objective_trace.push_back(st.objective);
    res.iterations = iter;
    if (std::abs(st.objective - f_last) < epsilon * std::abs(f_last)) {
      res.converged = true;
      break;
    }
  }
  res.a_hat = st.a;
  return res;
}

}  // namespace gfdet
