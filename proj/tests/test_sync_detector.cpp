#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gfdet/sync_detector.hpp"
#include "gfdet/verify.hpp"

using namespace gfdet;

namespace {

SystemParams mk_params(int N, int L, int M, double noise = 1.0, double p_act = 0.3) {
  SystemParams p;
  p.N = N;
  p.L = L;
  p.M = M;
  p.noise_var = noise;
  p.active_prob = p_act;
  return p;
}

}  // namespace

TEST_CASE("coord stats at the zero state") {
  const SystemParams p = mk_params(6, 8, 4, 2.0);
  const DetectionInput in = random_input(Case::Sync, p, 0.5, 1);
  const DetectorState st = init_state(in, false);
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, p, in.pilots, in.stats, grid);
  for (int n = 0; n < p.N; ++n) {
    const auto s = coord_stats_sync(st.sigma_inv, st.ytilde, cache.base().col(n),
                                    in.stats.Hbar.col(n), in.stats.kappa[n]);
    const double want = in.stats.gamma()[n] * in.pilots.P.col(n).squaredNorm() / 2.0;
    CHECK(s.alpha == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("coord stats with zero residual") {
  const SystemParams p = mk_params(4, 6, 3);
  const DetectionInput in = random_input(Case::Sync, p, 0.5, 2);
  const DetectorState st = init_state(in, false);
  const MatrixXcd zero = MatrixXcd::Zero(p.L, p.M);
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, p, in.pilots, in.stats, grid);
  const auto s = coord_stats_sync(st.sigma_inv, zero, cache.base().col(0),
                                  in.stats.Hbar.col(0), in.stats.kappa[0]);
  CHECK(s.beta == 0.0);
  CHECK(s.eta == 0.0);
}

TEST_CASE("coord stats match the definitional dense forms") {
  const SystemParams p = mk_params(10, 8, 5);
  const DetectionInput in = random_input(Case::Sync, p, 0.7, 3);
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, p, in.pilots, in.stats, grid);
  Rng rng(4);
  VectorXd a(p.N);
  for (int n = 0; n < p.N; ++n) a[n] = rng.uniform();
  const VectorXi t = VectorXi::Zero(p.N);
  const VectorXd w = VectorXd::Zero(p.N);
  const MatrixXcd sigma_inv = covariance_dense(in, a, t, w).inverse();
  const MatrixXcd ytilde = in.Y - mean_dense(in, a, t, w);
  for (int n = 0; n < p.N; ++n) {
    const auto s = coord_stats_sync(sigma_inv, ytilde, cache.base().col(n),
                                    in.stats.Hbar.col(n), in.stats.kappa[n]);
    const double g = in.stats.g[n];
    const double k = in.stats.kappa[n];
    const VectorXcd pv = in.pilots.P.col(n);
    const double alpha_def = (g / (1.0 + k)) * pv.dot(sigma_inv * pv).real();
    const VectorXcd sp = sigma_inv * pv;
    const double beta_def =
        (g / (p.M * (1.0 + k))) * (ytilde.adjoint() * sp).squaredNorm();
    const double eta_def =
        2.0 / p.M * std::sqrt(g * k / (1.0 + k)) *
        (in.stats.Hbar.col(n).transpose() * (ytilde.adjoint() * sp)).value().real();
    CHECK(s.alpha == doctest::Approx(alpha_def).epsilon(1e-9));
    CHECK(s.beta == doctest::Approx(beta_def).epsilon(1e-9));
    CHECK(s.eta == doctest::Approx(eta_def).epsilon(1e-9));
  }
}

TEST_CASE("optimal increment: Rayleigh limit") {
  Rng rng(5);
  for (int r = 0; r < 200; ++r) {
    CoordStatsSync s;
    s.alpha = rng.uniform(0.1, 3.0);
    s.beta = rng.uniform(0.0, 5.0);
    s.eta = 0.0;
    const double a_n = rng.uniform();
    const double tiny = 1e-10;
    const double got = optimal_increment(s, tiny, a_n);
    const double want =
        std::clamp((s.beta - s.alpha) / (s.alpha * s.alpha), -a_n, 1.0 - a_n);
    CHECK(std::abs(got - want) < 1e-4);
  }
}

TEST_CASE("optimal increment: non-positive discriminant removes the device") {
  CoordStatsSync s;
  s.alpha = 0.1;
  s.beta = 0.2;
  s.eta = -50.0;  // 4k(k+b+e)+a^2 <= 0
  const double a_n = 0.4;
  CHECK(optimal_increment(s, 1.0, a_n) == -a_n);
}

TEST_CASE("optimal increment rejects alpha <= 0") {
  CoordStatsSync s;
  s.alpha = 0.0;
  CHECK_THROWS_AS(optimal_increment(s, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("optimal increment beats a fine grid of the scalar surrogate") {
  Rng rng(6);
  for (int r = 0; r < 200; ++r) {
    CoordStatsSync s;
    s.alpha = rng.uniform(0.05, 4.0);
    s.beta = rng.uniform(0.0, 6.0);
    s.eta = rng.uniform(-3.0, 3.0);
    const double kappa = std::pow(10.0, rng.uniform(-3.0, 1.0));
    // stay inside the reachable region a alpha < 1
    const double a_n = rng.uniform() * std::min(1.0, 0.99 / s.alpha);
    const double d_star = optimal_increment(s, kappa, a_n);
    const double f_star = coordinate_objective_delta(s, kappa, d_star);
    const double step = 1e-4;
    for (double d = -a_n; d <= 1.0 - a_n + 1e-12; d += step) {
      const double f = coordinate_objective_delta(s, kappa, std::min(d, 1.0 - a_n));
      CHECK(f_star <= f + 1e-9);
    }
  }
}

TEST_CASE("run_sync: pure-noise instance yields near-zero activities") {
  // noise power well above the per-device received power, but enough
  // observations (L, M) that the covariance fit does not hallucinate actives
  SystemParams p = mk_params(20, 24, 32, 2.0, 0.2);
  Rng rng(8);
  DetectionInput in;
  in.kase = Case::Sync;
  in.params = p;
  in.pilots = gen_pilots(rng, p.L, p.N);
  in.stats = uniform_stats(gen_los(rng, p.M, p.N), 1.0, 0.5);
  Scenario sc = gen_scenario(rng, Case::Sync, p);
  sc.a_true.setZero();
  in.Y = synthesize_received(Case::Sync, p, in.pilots, in.stats, sc).Y;
  const SyncResult r = run_sync(in);
  CHECK(r.a_hat.maxCoeff() < 0.1);
}

TEST_CASE("run_sync: single strong device is found") {
  SystemParams p = mk_params(10, 20, 16, 0.01, 0.1);
  Rng rng(9);
  DetectionInput in;
  in.kase = Case::Sync;
  in.params = p;
  in.pilots = gen_pilots(rng, p.L, p.N);
  in.stats = uniform_stats(gen_los(rng, p.M, p.N), 1.0, 10.0);
  Scenario sc = gen_scenario(rng, Case::Sync, p);
  sc.a_true.setZero();
  sc.a_true[3] = 1;
  in.Y = synthesize_received(Case::Sync, p, in.pilots, in.stats, sc).Y;
  const SyncResult r = run_sync(in);
  int argmax = 0;
  r.a_hat.maxCoeff(&argmax);
  CHECK(argmax == 3);
  CHECK(r.a_hat[3] > 0.9);
}

TEST_CASE("run_sync: objective trace is monotone and the iterate feasible") {
  for (int r = 0; r < 10; ++r) {
    const SystemParams p = mk_params(15, 10, 4, 2.0, 0.3);
    const DetectionInput in = random_input(Case::Sync, p, 0.1, 20 + r);
    const SyncResult res = run_sync(in);
    CHECK(res.converged);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-9);
    CHECK((res.a_hat.array() >= 0.0).all());
    CHECK((res.a_hat.array() <= 1.0).all());
    // running objective agrees with a dense evaluation at the final point
    const double dense = negloglik(in, res.a_hat, VectorXi::Zero(p.N), VectorXd::Zero(p.N));
    CHECK(std::abs(res.objective_trace.back() - dense) <= 1e-7 * std::abs(dense));
  }
}

TEST_CASE("run_sync: coordinate optimality at termination") {
  const SystemParams p = mk_params(12, 10, 5, 2.0, 0.25);
  const DetectionInput in = random_input(Case::Sync, p, 0.1, 33);
  const SyncResult res = run_sync(in, 1e-10, 2000);
  const VectorXi t = VectorXi::Zero(p.N);
  const VectorXd w = VectorXd::Zero(p.N);
  const MatrixXcd sigma_inv = covariance_dense(in, res.a_hat, t, w).inverse();
  const MatrixXcd ytilde = in.Y - mean_dense(in, res.a_hat, t, w);
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, p, in.pilots, in.stats, grid);
  for (int n = 0; n < p.N; ++n) {
    const auto s = coord_stats_sync(sigma_inv, ytilde, cache.base().col(n),
                                    in.stats.Hbar.col(n), in.stats.kappa[n]);
    double best = 0.0;
    for (double d = -res.a_hat[n]; d <= 1.0 - res.a_hat[n] + 1e-12; d += 1e-3)
      best = std::min(best,
                      coordinate_objective_delta(s, in.stats.kappa[n],
                                                 std::min(d, 1.0 - res.a_hat[n])));
    CHECK(best > -1e-6);
  }
}

TEST_CASE("run_sync under exact Rayleigh fading reproduces the Rayleigh update") {
  // kappa = 0: eta = 0, LoS weight 0, and the increment must equal the
  // Rayleigh formula exactly on every step of the first sweep.
  const SystemParams p = mk_params(8, 10, 4, 1.0, 0.4);
  const DetectionInput in = random_input(Case::Sync, p, 0.0, 55);
  const DetectorState st = init_state(in, false);
  const OffsetGrid grid = offset_grid(Case::Sync, 0, 0.0, 1);
  const PilotCache cache(Case::Sync, p, in.pilots, in.stats, grid);
  for (int n = 0; n < p.N; ++n) {
    const auto s = coord_stats_sync(st.sigma_inv, st.ytilde, cache.base().col(n),
                                    in.stats.Hbar.col(n), 0.0);
    const double d = optimal_increment(s, 0.0, 0.0);
    const double rayleigh = std::clamp((s.beta - s.alpha) / (s.alpha * s.alpha), 0.0, 1.0);
    CHECK(d == rayleigh);
  }
}
