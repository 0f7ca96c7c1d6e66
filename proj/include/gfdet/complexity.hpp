#pragma once

#include "gfdet/types.hpp"

namespace gfdet {

/// Flop costs of the primitive operations the per-device counts are built
/// from (K the vector/matrix dimension).
struct FlopPrimitives {
  static double psi_op(int K) { return static_cast<double>(K) * K; }
  static double hadamard(int K) { return 6.0 * K; }
  static double inner_product(int K) { return 8.0 * K - 2.0; }
  static double sum_entries(int K) { return 2.0 * K - 2.0; }
  static double fft(int K) { return 5.0 * K * std::log2(static_cast<double>(K)); }
  static double symmetric_triple_rank_one(int K) { return 10.0 * K * K + 4.0 * K; }
};

/// Per-device flop count of the direct strategy's statistics steps:
/// |X^_i| (8 L_i^2 + 8 L_i M + 10 L_i + 6 M - 5).
double flops_direct_per_device(Case c, int L, int M, int D, double Omega, int Q);

/// Per-device flop count of the FFT strategy's statistics steps.
double flops_fft_per_device(Case c, int L, int M, int D, double Omega, int Q);

/// Sufficient-condition offset thresholds at which one strategy's flop count
/// provably exceeds the other's. bounds_valid flags L >= 6, which the bounds
/// assume.
struct CrossoverThresholds {
  double dbar_t = 0.0;        // D below this: direct cheaper (case T)
  double dunder_t = 0.0;      // D above this: FFT cheaper (case T)
  double omegabar_f = 0.0;    // Omega below: direct cheaper (case F)
  double omegaunder_f = 0.0;  // Omega above: FFT cheaper (case F)
  double dbar_tf = 0.0;
  double omegabar_tf = 0.0;
  double dunder_tf = 0.0;
  double omegaunder_tf = 0.0;
  bool bounds_valid = true;
};

CrossoverThresholds crossover_thresholds(int L, int M, int Q, int D, double Omega);

/// Number of kept CFO grid points 2 floor(Q Omega / 2pi) + 1(Omega != pi);
/// auxiliary of the TF thresholds.
double cfo_grid_span(int Q, double Omega);

/// Power of L in the per-iteration complexity with M = Theta(L^s),
/// Q = Theta(L^q); log_factor marks an extra log2 L multiplier, which for the
/// TF FFT strategy additionally scales with (D+1).
struct OrderDescriptor {
  double exponent = 0.0;
  bool log_factor = false;
  bool log_scales_with_sto = false;
};

OrderDescriptor asymptotic_order(Case c, Strategy strategy, double s, double q);

enum class OrderComparison { FftHigher, FftLower, Equal };

/// Which strategy has the lower complexity order at (s, q).
OrderComparison compare_orders(Case c, double s, double q);

struct StrategyChoice {
  Strategy strategy = Strategy::Direct;
  bool in_band = false;  // between the thresholds; direct chosen by default
};

/// FFT when the "larger" threshold condition holds, direct when the "smaller"
/// one does, direct (flagged) in the indeterminate band between them.
StrategyChoice recommend_strategy(Case c, int L, int M, int Q, int D, double Omega);

}  // namespace gfdet
