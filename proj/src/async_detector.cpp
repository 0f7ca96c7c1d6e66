#include "gfdet/async_detector.hpp"

namespace gfdet {

CandidateStats candidate_stats_direct(const LeaveOneOut& loo, int n, const OffsetGrid& grid,
                                      const PilotCache& cache, double kappa,
                                      const VectorXcd& hbar, int M) {
  const int K = grid.size();
  CandidateStats s;
  s.alpha.resize(K);
  s.beta.resize(K);
  s.eta.resize(K);
  const double es = 2.0 * std::sqrt(kappa) / M;
  VectorXcd p, c, d;
  for (int k = 0; k < K; ++k) {
    p = cache.candidate(n, grid, k);
    c.noalias() = loo.sigma_inv * p;
    d.noalias() = loo.ytilde.adjoint() * c;
    s.alpha[k] = p.dot(c).real();
    s.beta[k] = d.squaredNorm() / M;
    s.eta[k] = es * (hbar.transpose() * d).value().real();
  }
  return s;
}

CandidateStats candidate_stats_fft(Case c, const SystemParams& params, const OffsetGrid& grid,
                                   const PilotCache& cache, const LeaveOneOut& loo, int n,
                                   double kappa) {
  FftStatsEngine engine(c, params, grid, cache);
  CandidateStats s;
  engine.compute(loo, n, kappa, s.alpha, s.beta, s.eta);
  return s;
}

BlockUpdate block_update(const CandidateStats& stats, double kappa) {
  const int K = static_cast<int>(stats.alpha.size());
  if (K == 0) throw std::invalid_argument("block_update: empty candidate stats");
  BlockUpdate bu;
  bu.d.resize(K);
  bu.h.resize(K);
  for (int k = 0; k < K; ++k) {
    const CoordStatsSync s{stats.alpha[k], stats.beta[k], stats.eta[k]};
    double d;
    if (kappa * s.alpha < 1e-8) {
      d = std::clamp((s.beta - s.alpha) / (s.alpha * s.alpha), 0.0, 1.0);
    } else {
      const double disc = 4.0 * kappa * (kappa + s.beta + s.eta) + s.alpha * s.alpha;
      d = disc > 0.0
              ? std::clamp((-s.alpha - 2.0 * kappa + std::sqrt(disc)) / (2.0 * kappa * s.alpha),
                           0.0, 1.0)
              : 0.0;
    }
    bu.d[k] = d;
    bu.h[k] = coordinate_objective_delta(s, kappa, d);
    if (bu.h[k] < bu.h[bu.x_star]) bu.x_star = k;
  }
  bu.a_star = bu.d[bu.x_star];
  return bu;
}

AsyncResult run_async(const DetectionInput& in, const OffsetGrid& grid, Strategy strategy,
                      double epsilon, int max_iters) {
  in.validate();
  if (grid.kase != in.kase) throw std::invalid_argument("run_async: grid/case mismatch");
  if (in.kase == Case::Sync)
    throw std::invalid_argument("run_async: asynchronous cases only (use run_sync)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("run_async: epsilon must be positive");

  const int N = in.params.N;
  const int M = in.params.M;
  const PilotCache cache(in.kase, in.params, in.pilots, in.stats, grid);
  const bool with_phi = strategy == Strategy::Fft;
  std::optional<FftStatsEngine> engine;
  if (with_phi) engine.emplace(in.kase, in.params, grid, cache);

  DetectorState st = init_state(in, with_phi);
  AsyncResult res;
  res.strategy_used = strategy;
  res.objective_trace.push_back(st.objective);

  LeaveOneOut loo;
  CandidateStats stats;
  for (int iter = 1; iter <= max_iters; ++iter) {
    const double f_last = st.objective;
    for (int n = 0; n < N; ++n) {
      const double kappa = in.stats.kappa[n];
      const auto hbar = in.stats.Hbar.col(n);
      const int k_old = st.cand[n];
      const double a_old = st.a[n];
      const VectorXcd pbar_cur = cache.candidate(n, grid, k_old);
      remove_device(st, n, pbar_cur, kappa, hbar, M, loo);

      if (strategy == Strategy::Direct)
        stats = candidate_stats_direct(loo, n, grid, cache, kappa, hbar, M);
      else
        engine->compute(loo, n, kappa, stats.alpha, stats.beta, stats.eta);

      const BlockUpdate bu = block_update(stats, kappa);

      const double g_old =
          a_old == 0.0
              ? 0.0
              : coordinate_objective_delta(
                    CoordStatsSync{stats.alpha[k_old], stats.beta[k_old], stats.eta[k_old]},
                    kappa, a_old);
      st.objective += bu.h[bu.x_star] - g_old;

      const VectorXcd pbar_new = cache.candidate(n, grid, bu.x_star);
      restore_device(st, loo, n, bu.a_star, bu.x_star, pbar_new, kappa, hbar, M);
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
  res.cand_hat = st.cand;
  res.t_hat.resize(N);
  res.omega_hat.resize(N);
  for (int n = 0; n < N; ++n) {
    const OffsetGrid::Candidate c = grid.at(st.cand[n]);
    res.t_hat[n] = c.t;
    res.omega_hat[n] = c.omega;
  }
  return res;
}

}  // namespace gfdet
