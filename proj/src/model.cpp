#include "gfdet/model.hpp"

#include <cmath>

namespace gfdet {

const char* to_string(Case c) {
  switch (c) {
    case Case::Sync: return "sync";
    case Case::T: return "t";
    case Case::F: return "f";
    case Case::TF: return "tf";
  }
  return "?";
}

Case case_from_string(const std::string& s) {
  if (s == "sync") return Case::Sync;
  if (s == "t") return Case::T;
  if (s == "f") return Case::F;
  if (s == "tf" || s == "t,f" || s == "(t,f)") return Case::TF;
  throw std::invalid_argument("unknown case '" + s + "' (expected sync|t|f|tf)");
}

const char* to_string(Strategy s) { return s == Strategy::Direct ? "direct" : "fft"; }

Strategy strategy_from_string(const std::string& s) {
  if (s == "direct") return Strategy::Direct;
  if (s == "fft") return Strategy::Fft;
  throw std::invalid_argument("unknown strategy '" + s + "' (expected direct|fft)");
}

void SystemParams::validate(Case c) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (N < 1) fail("N must be positive");
  if (M < 1) fail("M must be positive");
  if (L < 1) fail("L must be positive");
  if (D < 0) fail("D must be non-negative");
  if (Omega < 0.0 || Omega > M_PI) fail("Omega must lie in [0, pi]");
  if (noise_var <= 0.0) fail("noise_var must be positive");
  if (active_prob <= 0.0 || active_prob >= 1.0) fail("active_prob must lie in (0,1)");
  if (has_sto(c) && D < 1) fail(std::string(to_string(c)) + " case requires D >= 1");
  if (!has_sto(c) && D != 0) fail(std::string(to_string(c)) + " case requires D = 0");
  if (has_cfo(c) && !(Omega > 0.0)) fail(std::string(to_string(c)) + " case requires Omega > 0");
  if (!has_cfo(c) && Omega != 0.0) fail(std::string(to_string(c)) + " case requires Omega = 0");
  if (has_cfo(c) && Q < 1) fail("Q must be positive for CFO cases");
}

void ChannelStatistics::validate() const {
  const int n = devices();
  if (kappa.size() != n || Hbar.cols() != n)
    throw std::invalid_argument("channel statistics dimension mismatch");
  if ((g.array() <= 0.0).any()) throw std::invalid_argument("g must be positive");
  if ((kappa.array() < 0.0).any()) throw std::invalid_argument("kappa must be non-negative");
  if (((Hbar.array().abs() - 1.0).abs() > 1e-12).any())
    throw std::invalid_argument("Hbar entries must be unit-modulus");
}

PilotBook gen_pilots(Rng& rng, int L, int N) {
  MatrixXcd P(L, N);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < L; ++l) P(l, n) = rng.cnormal();
  return PilotBook{std::move(P)};
}

MatrixXcd gen_los(Rng& rng, int M, int N) {
  MatrixXcd H(M, N);
  for (int n = 0; n < N; ++n) {
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    for (int m = 0; m < M; ++m) H(m, n) = std::polar(1.0, m * phi);
  }
  return H;
}

Scenario gen_scenario(Rng& rng, Case c, const SystemParams& params) {
  Scenario s;
  const int N = params.N;
  s.a_true.resize(N);
  s.t_true = VectorXi::Zero(N);
  s.omega_true = VectorXd::Zero(N);
  for (int n = 0; n < N; ++n) s.a_true[n] = rng.bernoulli(params.active_prob) ? 1 : 0;
  if (has_sto(c))
    for (int n = 0; n < N; ++n) s.t_true[n] = rng.uniform_int(0, params.D);
  if (has_cfo(c))
    for (int n = 0; n < N; ++n) s.omega_true[n] = rng.uniform(-params.Omega, params.Omega);
  s.Htilde.resize(params.M, N);
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < params.M; ++m) s.Htilde(m, n) = rng.cnormal();
  const int rows = params.signal_rows(c);
  const double sigma = std::sqrt(params.noise_var);
  s.Z.resize(rows, params.M);
  for (int m = 0; m < params.M; ++m)
    for (int l = 0; l < rows; ++l) s.Z(l, m) = sigma * rng.cnormal();
  return s;
}

VectorXcd tau(double omega, int rows) {
  VectorXcd v(rows);
  for (int l = 0; l < rows; ++l) v[l] = std::polar(1.0, l * omega);
  return v;
}

VectorXcd equivalent_pilot(Case c, const VectorXcd& p, int t, double omega, int D) {
  const int L = static_cast<int>(p.size());
  if (!has_sto(c) && t != 0) throw std::invalid_argument("nonzero STO in a case without STO");
  if (t < 0 || t > D) throw std::invalid_argument("STO out of {0..D}");
  if (c == Case::Sync) return p;
  const int rows = has_sto(c) ? L + D : L;
  VectorXcd out = VectorXcd::Zero(rows);
  out.segment(t, L) = p;
  if (has_cfo(c)) out.array() *= tau(omega, rows).array();
  return out;
}

MatrixXcd equivalent_pilot_matrix(Case c, const PilotBook& pilots, const VectorXi& t,
                                  const VectorXd& omega, int D) {
  const int N = static_cast<int>(pilots.P.cols());
  const int rows = has_sto(c) ? static_cast<int>(pilots.P.rows()) + D
                              : static_cast<int>(pilots.P.rows());
  MatrixXcd Pi(rows, N);
  for (int n = 0; n < N; ++n)
    Pi.col(n) = equivalent_pilot(c, pilots.P.col(n), t[n], omega[n], D);
  return Pi;
}

namespace {

MatrixXcd channel_matrix(const ChannelStatistics& stats, const Scenario& sc) {
  // h_n = sqrt(kappa/(1+kappa)) hbar_n + sqrt(1/(1+kappa)) htilde_n
  const ArrayXd w_los = (stats.kappa.array() / (1.0 + stats.kappa.array())).sqrt();
  const ArrayXd w_nlos = (1.0 / (1.0 + stats.kappa.array())).sqrt();
  MatrixXcd H = stats.Hbar * w_los.matrix().asDiagonal();
  H += sc.Htilde * w_nlos.matrix().asDiagonal();
  return H;
}

}  // namespace

ReceivedSignal synthesize_received(Case c, const SystemParams& params, const PilotBook& pilots,
                                   const ChannelStatistics& stats, const Scenario& scenario) {
  if (pilots.P.rows() != params.L || pilots.P.cols() != params.N ||
      stats.devices() != params.N || stats.antennas() != params.M ||
      scenario.Z.rows() != params.signal_rows(c) || scenario.Z.cols() != params.M)
    throw std::invalid_argument("synthesize_received: dimension mismatch");
  const MatrixXcd H = channel_matrix(stats, scenario);
  MatrixXcd Y = scenario.Z;
  for (int n = 0; n < params.N; ++n) {
    if (scenario.a_true[n] == 0) continue;
    const VectorXcd pn = equivalent_pilot(c, pilots.P.col(n), scenario.t_true[n],
                                          scenario.omega_true[n], params.D);
    Y.noalias() += std::sqrt(stats.g[n]) * pn * H.col(n).transpose();
  }
  return ReceivedSignal{c, std::move(Y)};
}

MatrixXcd received_compact_form(Case c, const SystemParams& params, const PilotBook& pilots,
                                const ChannelStatistics& stats, const Scenario& scenario) {
  const MatrixXcd Pi = equivalent_pilot_matrix(c, pilots, scenario.t_true,
                                               scenario.omega_true, params.D);
  const ArrayXd a = scenario.a_true.cast<double>().array();
  const ArrayXd gamma_sqrt = stats.gamma().sqrt();
  const MatrixXcd inner = stats.kappa.array().sqrt().matrix().asDiagonal() *
                              stats.Hbar.transpose() +
                          scenario.Htilde.transpose();
  return Pi * (a * gamma_sqrt).matrix().asDiagonal() * inner + scenario.Z;
}

int offset_grid_cardinality(Case c, int D, double Omega, int Q) {
  const int n_t = D + 1;
  int n_f = Q;
  if (Omega != M_PI)
    n_f = Q + 2 * static_cast<int>(std::floor(Q * Omega / (2.0 * M_PI))) + 1 - Q;
  switch (c) {
    case Case::Sync: return 1;
    case Case::T: return n_t;
    case Case::F: return n_f;
    case Case::TF: return n_t * n_f;
  }
  return 0;
}

OffsetGrid offset_grid(Case c, int D, double Omega, int Q) {
  OffsetGrid grid;
  grid.kase = c;
  if (has_sto(c)) {
    for (int t = 0; t <= D; ++t) grid.sto.push_back(t);
  } else {
    grid.sto.push_back(0);
  }
  if (has_cfo(c)) {
    if (Q < 1) throw std::invalid_argument("offset_grid: Q must be positive for CFO cases");
    // omega^(q) = (q-1) 2pi/Q kept when it falls in [0, Omega] or [2pi - Omega, 2pi).
    const double tol = 1e-12;
    for (int q = 1; q <= Q; ++q) {
      const double w = (q - 1) * 2.0 * M_PI / Q;
      if (w <= Omega + tol || w >= 2.0 * M_PI - Omega - tol)
        grid.cfo.push_back(CfoCandidate{q, w});
    }
  } else {
    grid.cfo.push_back(CfoCandidate{1, 0.0});
  }
  return grid;
}

ChannelStatistics uniform_stats(MatrixXcd Hbar, double g, double kappa) {
  ChannelStatistics st;
  const int N = static_cast<int>(Hbar.cols());
  st.g = VectorXd::Constant(N, g);
  st.kappa = VectorXd::Constant(N, kappa);
  st.Hbar = std::move(Hbar);
  return st;
}

}  // namespace gfdet
