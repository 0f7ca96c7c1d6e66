#include "gfdet/complexity.hpp"

#include "gfdet/model.hpp"

#include <cmath>

namespace gfdet {

namespace {

void require_async(Case c) {
  if (c == Case::Sync)
    throw std::invalid_argument("complexity model covers the asynchronous cases only");
}

double log2d(double x) { return std::log2(x); }

}  // namespace

double cfo_grid_span(int Q, double Omega) {
  return 2.0 * std::floor(Q * Omega / (2.0 * M_PI)) + (Omega != M_PI ? 1.0 : 0.0);
}

double flops_direct_per_device(Case c, int L, int M, int D, double Omega, int Q) {
  require_async(c);
  const double Li = has_sto(c) ? L + D : L;
  const double nx = offset_grid_cardinality(c, D, Omega, Q);
  return nx * (8.0 * Li * Li + 8.0 * Li * M + 10.0 * Li + 6.0 * M - 5.0);
}

double flops_fft_per_device(Case c, int L, int M, int D, double Omega, int Q) {
  require_async(c);
  (void)Omega;  // the FFT-strategy cost does not depend on the CFO range
  switch (c) {
    case Case::T: {
      const double Lt = L + D;
      return 10.0 * Lt * Lt * log2d(Lt) + 90.0 * Lt * Lt + 20.0 * Lt * log2d(Lt) +
             16.0 * Lt * M + 6.0 * Lt;
    }
    case Case::F: {
      const double Lf = L;
      return 90.0 * Lf * Lf + 16.0 * Lf * M + 6.0 * Lf + 15.0 * Q * log2d(Q);
    }
    case Case::TF: {
      const double Ltf = L + D;
      return 20.0 * Ltf * Ltf * log2d(Ltf) + 86.0 * Ltf * Ltf + 16.0 * Ltf * M +
             6.0 * (D + 5.0 / 3.0) * Ltf + 15.0 * (D + 1.0) * Q * log2d(Q);
    }
    default: return 0.0;
  }
}

CrossoverThresholds crossover_thresholds(int L, int M, int Q, int D, double Omega) {
  CrossoverThresholds th;
  th.bounds_valid = L >= 6;
  const double log2L = log2d(L);
  const double log2e = std::log2(std::exp(1.0));
  const double S = cfo_grid_span(Q, Omega);

  th.dbar_t = (std::sqrt((12.0 * L + 10.0 * M - 78.0) * (12.0 * L + 10.0 * M - 78.0) +
                         48.0 * (78.0 * L + 6.0 * M)) +
               78.0 - 12.0 * L - 10.0 * M) /
              24.0;
  th.dunder_t = (26.0 + 5.0 * log2L) / (2.0 - 5.0 * log2e / L);

  th.omegabar_f = (39.0 * L + 3.0 * M) * M_PI / (Q * (6.0 * L + 5.0 * M));
  th.omegaunder_f =
      (120.0 * L + 20.0 * L * log2L + 24.0 * M + 16.0 * Q * log2d(Q)) * M_PI /
      (8.0 * Q * (L + M));

  const double theta_tf =
      std::pow(S * (12.0 * L + 10.0 * M + 12.0) - 90.0, 2) -
      48.0 * S * (12.0 * L * S + 10.0 * M * S - 90.0 * L - 16.0 * M);
  th.dbar_tf = theta_tf <= 0.0
                   ? -1.0
                   : (90.0 - S * (12.0 * L + 10.0 * M + 12.0) + std::sqrt(theta_tf)) /
                         (24.0 * S);
  th.omegabar_tf = M_PI / Q *
                   ((90.0 * (L + D) + 16.0 * M) / ((D + 1.0) * (12.0 * (L + D) + 10.0 * M)) -
                    1.0);
  th.dunder_tf = std::max(
      (112.0 + 20.0 * log2L - 8.0 * S) / (8.0 * S - 20.0 * log2e / L),
      (16.0 * M + 16.0 * Q * log2d(Q)) / (8.0 * M * S) - 1.0);
  th.omegaunder_tf =
      M_PI / Q *
      (((112.0 + 20.0 * log2L + 20.0 * log2e / L * D) * (L + D) +
        16.0 * (M + Q * log2d(Q))) /
           (8.0 * (D + 1.0) * (L + D + M)) +
       1.0);
  return th;
}

OrderDescriptor asymptotic_order(Case c, Strategy strategy, double s, double q) {
  require_async(c);
  if (s < 0.0) throw std::invalid_argument("asymptotic_order: s must be non-negative");
  if (has_cfo(c) && q < 1.0) throw std::invalid_argument("asymptotic_order: q must be >= 1");
  const double sbar = std::max(1.0, s);
  OrderDescriptor d;
  if (strategy == Strategy::Direct) {
    d.exponent = has_cfo(c) ? 1.0 + q + sbar : 1.0 + sbar;
    return d;
  }
  if (c == Case::T) {
    d.exponent = 1.0 + sbar;
    d.log_factor = s <= 1.0;
    return d;
  }
  d.exponent = 1.0 + std::max(sbar, q - 1.0);
  d.log_factor = sbar <= q - 1.0;
  d.log_scales_with_sto = c == Case::TF && d.log_factor;
  return d;
}

OrderComparison compare_orders(Case c, double s, double q) {
  require_async(c);
  if (c == Case::T) return s > 1.0 ? OrderComparison::Equal : OrderComparison::FftHigher;
  (void)q;
  return OrderComparison::FftLower;
}

StrategyChoice recommend_strategy(Case c, int L, int M, int Q, int D, double Omega) {
  require_async(c);
  const CrossoverThresholds th = crossover_thresholds(L, M, Q, D, Omega);
  bool fft_cheaper = false;
  bool direct_cheaper = false;
  switch (c) {
    case Case::T:
      fft_cheaper = D > th.dunder_t;
      direct_cheaper = D < th.dbar_t;
      break;
    case Case::F:
      fft_cheaper = Omega > th.omegaunder_f;
      direct_cheaper = Omega < th.omegabar_f;
      break;
    case Case::TF:
      fft_cheaper = D > th.dunder_tf || Omega > th.omegaunder_tf;
      direct_cheaper = D < th.dbar_tf || Omega < th.omegabar_tf;
      break;
    default: break;
  }
  if (fft_cheaper) return StrategyChoice{Strategy::Fft, false};
  if (direct_cheaper) return StrategyChoice{Strategy::Direct, false};
  return StrategyChoice{Strategy::Direct, true};
}

}  // namespace gfdet
