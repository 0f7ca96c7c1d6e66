#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gfdet/async_detector.hpp"
#include "gfdet/fft_kernels.hpp"
#include "gfdet/verify.hpp"

using namespace gfdet;

namespace {

MatrixXcd random_hermitian(Rng& rng, int K) {
  MatrixXcd B(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) B(i, j) = rng.cnormal();
  return (B + B.adjoint()).eval();
}

SystemParams mk_params(Case c, int N, int L, int M, int D, double Omega, int Q) {
  SystemParams p;
  p.N = N;
  p.L = L;
  p.M = M;
  p.D = has_sto(c) ? D : 0;
  p.Omega = has_cfo(c) ? Omega : 0.0;
  p.Q = Q;
  p.noise_var = 1.0;
  p.active_prob = 0.3;
  return p;
}

// direct-vs-fft statistics comparison on a state a few steps in
void compare_strategies(Case c, const SystemParams& p, double kappa, std::uint64_t seed,
                        double tol) {
  const DetectionInput in = random_input(c, p, kappa, seed);
  const OffsetGrid grid = offset_grid(c, p.D, p.Omega, p.Q);
  const PilotCache cache(c, p, in.pilots, in.stats, grid);
  FftStatsEngine engine(c, p, grid, cache);

  DetectorState st = init_state(in, true);
  Rng rng(Rng::derive(seed, 9));
  LeaveOneOut loo;
  for (int n = 0; n < p.N; ++n) {
    const VectorXcd pcur = cache.candidate(n, grid, st.cand[n]);
    remove_device(st, n, pcur, kappa, in.stats.Hbar.col(n), p.M, loo);
    const double a_new = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
    const int cand = rng.uniform_int(0, grid.size() - 1);
    restore_device(st, loo, n, a_new, cand, cache.candidate(n, grid, cand), kappa,
                   in.stats.Hbar.col(n), p.M);
  }
  for (const int n : {0, p.N / 2, p.N - 1}) {
    const VectorXcd pcur = cache.candidate(n, grid, st.cand[n]);
    remove_device(st, n, pcur, kappa, in.stats.Hbar.col(n), p.M, loo);
    const CandidateStats direct =
        candidate_stats_direct(loo, n, grid, cache, kappa, in.stats.Hbar.col(n), p.M);
    CandidateStats fft;
    engine.compute(loo, n, kappa, fft.alpha, fft.beta, fft.eta);
    REQUIRE(fft.alpha.size() == grid.size());
    for (int k = 0; k < grid.size(); ++k) {
      CHECK(fft.alpha[k] == doctest::Approx(direct.alpha[k]).epsilon(tol).scale(1.0));
      CHECK(fft.beta[k] == doctest::Approx(direct.beta[k]).epsilon(tol).scale(1.0));
      CHECK(fft.eta[k] == doctest::Approx(direct.eta[k]).epsilon(tol).scale(1.0));
    }
    restore_device(st, loo, n, st.a[n], st.cand[n], pcur, kappa, in.stats.Hbar.col(n), p.M);
  }
}

}  // namespace

TEST_CASE("psi on simple matrices") {
  const MatrixXcd P = psi(MatrixXcd::Identity(3, 3));
  CHECK(P.col(0).isApprox(VectorXcd::Constant(3, cxd(M_SQRT1_2, 0.0))));
  CHECK(P.col(1).isZero());
  CHECK(P.col(2).isZero());

  MatrixXcd B = MatrixXcd::Zero(3, 3);
  B(0, 1) = cxd(0.3, -0.7);
  const MatrixXcd P2 = psi(B);
  CHECK(P2(0, 1) == B(0, 1));
  CHECK(P2.col(1).tail(2).isZero());
  CHECK(P2.col(0).isZero());
  CHECK(P2.col(2).isZero());
}

TEST_CASE("psi columns reconstruct the upper triangle") {
  Rng rng(1);
  const MatrixXcd B = random_hermitian(rng, 9);
  const MatrixXcd P = psi(B);
  CHECK((std::sqrt(2.0) * P.col(0) - B.diagonal()).cwiseAbs().maxCoeff() < 1e-14);
  for (int k = 1; k < 9; ++k)
    for (int l = 0; l + k < 9; ++l) CHECK(P(l, k) == B(l, l + k));
  // zero padding at the tail of each column
  for (int k = 1; k < 9; ++k) CHECK(P.col(k).tail(k).isZero());
}

TEST_CASE("xi: identity transform in the CFO-only case") {
  Rng rng(2);
  const MatrixXcd X = random_hermitian(rng, 7);
  VectorXcd pv(7);
  for (int i = 0; i < 7; ++i) pv[i] = rng.cnormal();
  const MatrixXcd got = xi(Case::F, X, pv);
  const MatrixXcd want = psi(X).cwiseProduct(psi(pv.conjugate() * pv.transpose()));
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);

  CHECK(xi(Case::F, X, VectorXcd::Zero(7)).isZero());
}

TEST_CASE("xi matches the dense DFT-matrix evaluation") {
  Rng rng(3);
  for (const int K : {5, 8, 12}) {
    const MatrixXcd X = random_hermitian(rng, K);
    VectorXcd pv(K);
    for (int i = 0; i < K; ++i) pv[i] = rng.cnormal();
    const MatrixXcd F = dft_matrix(K);
    const MatrixXcd want =
        (F.adjoint() * psi(X)).cwiseProduct(F * psi(pv.conjugate() * pv.transpose()));
    const MatrixXcd got = xi(Case::T, X, pv);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10 * K);
  }
}

TEST_CASE("tone multiply basics") {
  // first basis vector maps to the all-ones column
  const ToneSpec spec = make_tone_spec(8, 5);
  MatrixXcd e1 = MatrixXcd::Zero(5, 1);
  e1(0, 0) = 1.0;
  const MatrixXcd ones = tone_multiply(spec, e1);
  CHECK((ones.array() - cxd(1, 0)).abs().maxCoeff() < 1e-12);

  // Q = L_i: padded length Q and the gather is the whole IFFT, so
  // T b = Q IFFT(b)
  const int Q = 8;
  const ToneSpec spec2 = make_tone_spec(Q, Q);
  CHECK(spec2.padded == Q);
  CHECK(spec2.stride == 1);
  Rng rng(4);
  VectorXcd b(Q);
  for (int i = 0; i < Q; ++i) b[i] = rng.cnormal();
  const MatrixXcd got = tone_multiply(spec2, b);
  const Fft fft(Q);
  const VectorXcd want = static_cast<double>(Q) * fft.inverse(b);
  CHECK((got.col(0) - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tone multiply equals the explicit tone matrix, padding included") {
  Rng rng(5);
  for (const auto& [Q, L] : std::vector<std::pair<int, int>>{
           {8, 5}, {16, 16}, {4, 11}, {12, 7}, {3, 10}}) {
    const ToneSpec spec = make_tone_spec(Q, L);
    CHECK(spec.q_below_dim == (Q < L));
    MatrixXcd b(L, 2);
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < 2; ++j) b(i, j) = rng.cnormal();
    const MatrixXcd got = tone_multiply(spec, b);
    const MatrixXcd want = explicit_tone_matrix(Q, L) * b;
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fft candidate stats reduce to the sync stats at D = 0") {
  const Case c = Case::T;
  SystemParams p = mk_params(c, 8, 10, 4, 0, 0.0, 1);
  const double kappa = 0.5;
  const DetectionInput in = random_input(c, p, kappa, 11);
  const OffsetGrid grid = offset_grid(c, 0, 0.0, 1);
  REQUIRE(grid.size() == 1);
  const PilotCache cache(c, p, in.pilots, in.stats, grid);
  FftStatsEngine engine(c, p, grid, cache);
  const DetectorState st = init_state(in, true);
  LeaveOneOut loo;
  remove_device(st, 0, cache.candidate(0, grid, 0), kappa, in.stats.Hbar.col(0), p.M, loo);
  ArrayXd alpha, beta, eta;
  engine.compute(loo, 0, kappa, alpha, beta, eta);
  const auto s = coord_stats_sync(loo.sigma_inv, loo.ytilde, cache.base().col(0),
                                  in.stats.Hbar.col(0), kappa);
  CHECK(alpha[0] == doctest::Approx(s.alpha).epsilon(1e-9));
  CHECK(beta[0] == doctest::Approx(s.beta).epsilon(1e-9));
  CHECK(eta[0] == doctest::Approx(s.eta).epsilon(1e-9));
}

TEST_CASE("fft candidate stats equal direct stats: case T") {
  compare_strategies(Case::T, mk_params(Case::T, 10, 12, 4, 3, 0.0, 1), 0.6, 101, 1e-9);
}

TEST_CASE("fft candidate stats equal direct stats: case F") {
  compare_strategies(Case::F, mk_params(Case::F, 10, 8, 4, 0, M_PI, 16), 0.6, 102, 1e-9);
  // restricted grid exercises the index subset
  compare_strategies(Case::F, mk_params(Case::F, 9, 8, 4, 0, M_PI / 2, 16), 0.4, 103, 1e-9);
  // Omega = pi with Q < L exercises the padded tone transform
  compare_strategies(Case::F, mk_params(Case::F, 9, 12, 4, 0, M_PI, 8), 0.4, 104, 1e-9);
}

TEST_CASE("fft candidate stats equal direct stats: case TF") {
  compare_strategies(Case::TF, mk_params(Case::TF, 8, 9, 4, 2, M_PI, 8), 0.6, 105, 1e-9);
  compare_strategies(Case::TF, mk_params(Case::TF, 8, 9, 4, 2, 0.6 * M_PI, 8), 0.3, 106,
                     1e-9);
}

TEST_CASE("fft candidate stats: eta against the definitional form, case F") {
  const Case c = Case::F;
  const SystemParams p = mk_params(c, 8, 8, 4, 0, M_PI, 16);
  const double kappa = 0.8;
  const DetectionInput in = random_input(c, p, kappa, 12);
  const OffsetGrid grid = offset_grid(c, 0, M_PI, 16);
  const PilotCache cache(c, p, in.pilots, in.stats, grid);
  FftStatsEngine engine(c, p, grid, cache);
  const DetectorState st = init_state(in, true);
  LeaveOneOut loo;
  remove_device(st, 2, cache.candidate(2, grid, st.cand[2]), kappa, in.stats.Hbar.col(2),
                p.M, loo);
  ArrayXd alpha, beta, eta;
  engine.compute(loo, 2, kappa, alpha, beta, eta);
  for (int k = 0; k < grid.size(); ++k) {
    const VectorXcd px = cache.candidate(2, grid, k);
    const double eta_def = 2.0 * std::sqrt(kappa) / p.M *
                           (in.stats.Hbar.col(2).transpose() *
                            (loo.ytilde.adjoint() * (loo.sigma_inv * px)))
                               .value()
                               .real();
    CHECK(eta[k] == doctest::Approx(eta_def).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("circulant diagonalization identity") {
  Rng rng(6);
  for (const int K : {4, 9, 16}) {
    VectorXcd c(K);
    for (int i = 0; i < K; ++i) c[i] = rng.cnormal();
    MatrixXcd C(K, K);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) C(i, j) = c[(K + i - j) % K];
    const MatrixXcd F = dft_matrix(K);
    const MatrixXcd recon =
        F.adjoint() * (F * c).asDiagonal() * F / static_cast<double>(K);
    CHECK((recon - C).cwiseAbs().maxCoeff() < 1e-10);
  }
}
