#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gfdet/model.hpp"

using namespace gfdet;

namespace {

SystemParams params_for(Case, int N, int L, int M, int D, double Omega, int Q) {
  SystemParams p;
  p.N = N;
  p.L = L;
  p.M = M;
  p.D = D;
  p.Omega = Omega;
  p.Q = Q;
  p.noise_var = 1.0;
  p.active_prob = 0.3;
  return p;
}

}  // namespace

TEST_CASE("gen_pilots shape, determinism, and unit variance") {
  Rng r0(0);
  const PilotBook one = gen_pilots(r0, 1, 1);
  CHECK(one.P.rows() == 1);
  CHECK(one.P.cols() == 1);
  CHECK(std::isfinite(one.P(0, 0).real()));
  CHECK(std::isfinite(one.P(0, 0).imag()));

  Rng ra(42), rb(42);
  const PilotBook a = gen_pilots(ra, 20, 100);
  const PilotBook b = gen_pilots(rb, 20, 100);
  CHECK(a.P == b.P);

  const double var = a.P.array().abs2().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("gen_los geometry") {
  Rng rng(7);
  const MatrixXcd H = gen_los(rng, 6, 40);
  CHECK(((H.array().abs() - 1.0).abs() < 1e-12).all());
  for (int n = 0; n < 40; ++n) {
    const cxd ratio = H(1, n) / H(0, n);
    for (int m = 0; m + 1 < 6; ++m)
      CHECK(std::abs(H(m + 1, n) / H(m, n) - ratio) < 1e-12);
  }
  Rng rng1(7);
  const MatrixXcd H1 = gen_los(rng1, 1, 10);
  CHECK(((H1.array() - cxd(1.0, 0.0)).abs() < 1e-15).all());
}

TEST_CASE("gen_scenario respects case constraints") {
  Rng rng(3);
  const SystemParams p = params_for(Case::Sync, 50, 8, 4, 0, 0.0, 1);
  const Scenario s = gen_scenario(rng, Case::Sync, p);
  CHECK(s.t_true.isZero());
  CHECK(s.omega_true.isZero());
  CHECK(s.Z.rows() == 8);

  SystemParams p1 = p;
  p1.active_prob = 1.0;
  Rng rng1(4);
  const Scenario s1 = gen_scenario(rng1, Case::Sync, p1);
  CHECK(s1.a_true.sum() == 50);
}

TEST_CASE("gen_scenario activity rate within binomial band") {
  SystemParams p = params_for(Case::Sync, 10000, 2, 1, 0, 0.0, 1);
  p.active_prob = 0.08;
  Rng rng(11);
  const Scenario s = gen_scenario(rng, Case::Sync, p);
  const double rate = s.a_true.cast<double>().mean();
  const double sigma = std::sqrt(0.08 * 0.92 / 10000.0);
  CHECK(std::abs(rate - 0.08) < 3.0 * sigma);
}

TEST_CASE("tau values and periodicity") {
  CHECK(((tau(0.0, 5).array() - cxd(1, 0)).abs() < 1e-15).all());
  const VectorXcd alt = tau(M_PI, 4);
  CHECK(std::abs(alt[0] - cxd(1, 0)) < 1e-12);
  CHECK(std::abs(alt[1] - cxd(-1, 0)) < 1e-12);
  CHECK(std::abs(alt[2] - cxd(1, 0)) < 1e-12);
  CHECK(std::abs(alt[3] - cxd(-1, 0)) < 1e-12);
  const double w = 1.2345;
  CHECK(((tau(w + 2.0 * M_PI, 7) - tau(w, 7)).array().abs() < 1e-12).all());
}

TEST_CASE("equivalent_pilot per case") {
  VectorXcd p(2);
  p << cxd(1, 0), cxd(0, 1);

  const VectorXcd pt = equivalent_pilot(Case::T, p, 0, 0.0, 3);
  CHECK(pt.size() == 5);
  CHECK(pt.head(2) == p);
  CHECK(pt.tail(3).isZero());

  CHECK(equivalent_pilot(Case::F, p, 0, 0.0, 0) == p);

  // hand-evaluated composition at t=1, omega=pi, L=2, D=1
  const VectorXcd ptf = equivalent_pilot(Case::TF, p, 1, M_PI, 1);
  CHECK(ptf.size() == 3);
  CHECK(std::abs(ptf[0]) < 1e-15);
  CHECK(std::abs(ptf[1] - cxd(-1, 0)) < 1e-12);
  CHECK(std::abs(ptf[2] - cxd(0, 1)) < 1e-12);

  CHECK_THROWS_AS(equivalent_pilot(Case::T, p, 4, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(equivalent_pilot(Case::T, p, -1, 0.0, 3), std::invalid_argument);
}

TEST_CASE("equivalent_pilot CFO periodicity and energy preservation") {
  Rng rng(9);
  VectorXcd p(6);
  for (int i = 0; i < 6; ++i) p[i] = rng.cnormal();
  for (const double w : {0.3, 1.7, 3.0}) {
    const VectorXcd a = equivalent_pilot(Case::F, p, 0, w, 0);
    const VectorXcd b = equivalent_pilot(Case::F, p, 0, w + 2.0 * M_PI, 0);
    CHECK(((a - b).array().abs() < 1e-12).all());
    CHECK(a.norm() == doctest::Approx(p.norm()).epsilon(1e-12));
  }
}

TEST_CASE("synthesize_received: zero activity gives pure noise") {
  const SystemParams p = params_for(Case::TF, 10, 6, 3, 2, M_PI / 2, 8);
  Rng rng(5);
  const PilotBook pilots = gen_pilots(rng, p.L, p.N);
  const ChannelStatistics stats = uniform_stats(gen_los(rng, p.M, p.N), 1.0, 0.5);
  Scenario sc = gen_scenario(rng, Case::TF, p);
  sc.a_true.setZero();
  const ReceivedSignal y = synthesize_received(Case::TF, p, pilots, stats, sc);
  CHECK(y.Y == sc.Z);
}

TEST_CASE("synthesize_received: kappa -> inf collapses onto the LoS ray") {
  const SystemParams p = params_for(Case::Sync, 4, 8, 5, 0, 0.0, 1);
  Rng rng(6);
  const PilotBook pilots = gen_pilots(rng, p.L, p.N);
  const ChannelStatistics stats = uniform_stats(gen_los(rng, p.M, p.N), 2.0, 1e12);
  Scenario sc = gen_scenario(rng, Case::Sync, p);
  sc.a_true.setZero();
  sc.a_true[2] = 1;
  sc.Z.setZero();
  const ReceivedSignal y = synthesize_received(Case::Sync, p, pilots, stats, sc);
  const MatrixXcd want = std::sqrt(2.0) * pilots.P.col(2) * stats.Hbar.col(2).transpose();
  CHECK((y.Y - want).norm() / want.norm() < 1e-5);
}

TEST_CASE("synthesize_received matches the compact matrix form") {
  for (const Case c : {Case::Sync, Case::T, Case::F, Case::TF}) {
    const SystemParams p = params_for(c, 12, 7, 4, has_sto(c) ? 3 : 0,
                                      has_cfo(c) ? M_PI : 0.0, 8);
    Rng rng(17 + static_cast<int>(c));
    const PilotBook pilots = gen_pilots(rng, p.L, p.N);
    const ChannelStatistics stats = uniform_stats(gen_los(rng, p.M, p.N), 1.3, 0.7);
    const Scenario sc = gen_scenario(rng, c, p);
    const ReceivedSignal y = synthesize_received(c, p, pilots, stats, sc);
    const MatrixXcd compact = received_compact_form(c, p, pilots, stats, sc);
    CHECK((y.Y - compact).cwiseAbs().maxCoeff() / compact.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("offset_grid cardinalities") {
  CHECK(offset_grid(Case::T, 4, 0.0, 1).size() == 5);
  CHECK(offset_grid(Case::F, 0, M_PI, 128).size() == 128);
  CHECK(offset_grid(Case::F, 0, M_PI / 2, 16).size() == 9);

  // enumeration agrees with the closed form across a parameter sweep
  for (const int Q : {4, 7, 16, 33}) {
    for (const double om : {0.1, 0.25, 0.5, 0.77, 1.0}) {
      const double Omega = om * M_PI;
      const OffsetGrid gf = offset_grid(Case::F, 0, Omega, Q);
      CHECK(gf.size() == offset_grid_cardinality(Case::F, 0, Omega, Q));
      const OffsetGrid gtf = offset_grid(Case::TF, 3, Omega, Q);
      CHECK(gtf.size() == offset_grid_cardinality(Case::TF, 3, Omega, Q));
    }
  }

  CHECK_THROWS_AS(offset_grid(Case::F, 0, M_PI, 0), std::invalid_argument);

  // deterministic ordering: STO ascending, CFO grid index ascending
  const OffsetGrid g = offset_grid(Case::TF, 2, M_PI / 2, 8);
  CHECK(g.at(0).t == 0);
  CHECK(g.at(0).q == 1);
  CHECK(g.at(0).omega == 0.0);
  for (int k = 1; k < g.size(); ++k) {
    const auto prev = g.at(k - 1);
    const auto cur = g.at(k);
    CHECK((cur.t > prev.t || (cur.t == prev.t && cur.q > prev.q)));
  }
}

TEST_CASE("system params validation") {
  SystemParams p = params_for(Case::T, 10, 6, 3, 2, 0.0, 8);
  CHECK_NOTHROW(p.validate(Case::T));
  CHECK_THROWS_AS(p.validate(Case::F), std::invalid_argument);   // D != 0
  p.D = 0;
  CHECK_THROWS_AS(p.validate(Case::F), std::invalid_argument);   // Omega == 0
  p.Omega = M_PI / 4;
  CHECK_NOTHROW(p.validate(Case::F));
  CHECK_THROWS_AS(p.validate(Case::T), std::invalid_argument);   // Omega > 0
}
