#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gfdet {

using cxd = std::complex<double>;
using Eigen::ArrayXd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

/// Synchronization case: perfect sync, symbol-time offsets only (T),
/// carrier-frequency offsets only (F), or both (TF).
enum class Case { Sync, T, F, TF };

inline bool has_sto(Case c) { return c == Case::T || c == Case::TF; }
inline bool has_cfo(Case c) { return c == Case::F || c == Case::TF; }

const char* to_string(Case c);
Case case_from_string(const std::string& s);

/// How per-candidate statistics are computed in the asynchronous detectors.
/// Both strategies produce the same iterates; they differ only in cost.
enum class Strategy { Direct, Fft };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// Raised when a numerical invariant breaks (non-PD covariance,
/// singular rank-one denominator, non-finite objective).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SystemParams {
  int N = 1000;              // devices
  int M = 48;                // antennas
  int L = 60;                // pilot length
  int D = 0;                 // max symbol time offset
  double Omega = 0.0;        // max |CFO| in rad/symbol, in [0, pi]
  int Q = 128;               // CFO grid density
  double noise_var = 2.0;    // sigma^2
  double active_prob = 0.08;

  /// Rows of the received signal for the given case (L for Sync/F, L+D otherwise).
  int signal_rows(Case c) const { return has_sto(c) ? L + D : L; }

  void validate(Case c) const;  // throws std::invalid_argument
};

struct ChannelStatistics {
  VectorXd g;       // large-scale fading power, > 0
  VectorXd kappa;   // Rician factor, >= 0
  MatrixXcd Hbar;   // M x N normalized LoS, unit-modulus entries

  int devices() const { return static_cast<int>(g.size()); }
  int antennas() const { return static_cast<int>(Hbar.rows()); }

  /// Per-device NLoS power g_n / (1 + kappa_n).
  ArrayXd gamma() const { return g.array() / (1.0 + kappa.array()); }

  void validate() const;
};

struct PilotBook {
  MatrixXcd P;  // L x N, column n is device n's pilot
};

struct Scenario {
  VectorXi a_true;       // 0/1 activity
  VectorXi t_true;       // STO in {0..D}
  VectorXd omega_true;   // CFO in [-Omega, Omega]
  MatrixXcd Htilde;      // M x N NLoS draws, CN(0,1)
  MatrixXcd Z;           // L_i x M noise, CN(0, sigma^2)
  std::uint64_t seed = 0;
};

struct ReceivedSignal {
  Case kase = Case::Sync;
  MatrixXcd Y;  // L_i x M
};

struct CfoCandidate {
  int q;         // 1-based grid index, omega = (q-1) * 2*pi / Q
  double omega;  // value in [0, 2*pi)
};

/// Finite search set X^_i for one case. Candidates are flattened with STO
/// ascending as the slow index and CFO grid index ascending as the fast one,
/// so argmin tie-breaking on the flat index is reproducible.
struct OffsetGrid {
  Case kase = Case::Sync;
  std::vector<int> sto;            // {0..D} when the case has STO, else {0}
  std::vector<CfoCandidate> cfo;   // grid candidates when the case has CFO, else {(1, 0)}

  int size() const { return static_cast<int>(sto.size() * cfo.size()); }
  int n_sto() const { return static_cast<int>(sto.size()); }
  int n_cfo() const { return static_cast<int>(cfo.size()); }

  struct Candidate {
    int t;
    int q;
    double omega;
  };

  int flat_index(int sto_pos, int cfo_pos) const { return sto_pos * n_cfo() + cfo_pos; }

  Candidate at(int k) const {
    const int nc = n_cfo();
    const CfoCandidate& c = cfo[static_cast<std::size_t>(k % nc)];
    return Candidate{sto[static_cast<std::size_t>(k / nc)], c.q, c.omega};
  }
};

}  // namespace gfdet
