#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gfdet/complexity.hpp"
#include "gfdet/model.hpp"

using namespace gfdet;

TEST_CASE("direct flop count closed form") {
  CHECK(flops_direct_per_device(Case::T, 6, 1, 0, 0.0, 1) == 397.0);
  // (T, L=60, M=48, D=4): 5 (8 64^2 + 8 64 48 + 10 64 + 6 48 - 5)
  const double want = 5.0 * (8.0 * 64 * 64 + 8.0 * 64 * 48 + 10.0 * 64 + 6.0 * 48 - 5.0);
  CHECK(flops_direct_per_device(Case::T, 60, 48, 4, 0.0, 1) == want);

  // doubling M adds |X| (8 L_i + 6) M flops
  const double f1 = flops_direct_per_device(Case::T, 20, 8, 3, 0.0, 1);
  const double f2 = flops_direct_per_device(Case::T, 20, 16, 3, 0.0, 1);
  CHECK(f2 - f1 == 4.0 * (8.0 * 23 + 6.0) * 8.0);
}

TEST_CASE("fft flop count closed form") {
  // case F with Q = 1: the Q log2 Q term vanishes
  const int L = 24, M = 7;
  CHECK(flops_fft_per_device(Case::F, L, M, 0, M_PI, 1) ==
        90.0 * L * L + 16.0 * L * M + 6.0 * L);

  // (F, L=60, M=48, Q=128) term-by-term recomputation
  const double want = 90.0 * 60 * 60 + 16.0 * 60 * 48 + 6.0 * 60 +
                      15.0 * 128 * std::log2(128.0);
  CHECK(flops_fft_per_device(Case::F, 60, 48, 0, M_PI, 128) ==
        doctest::Approx(want).epsilon(1e-14));

  // case TF: D enters only via 6(D+5/3)L and 15(D+1)Q log2 Q at fixed L_i
  const double a0 = flops_fft_per_device(Case::TF, 30, 8, 2, M_PI, 16);
  const double a1 = flops_fft_per_device(Case::TF, 29, 8, 3, M_PI, 16);  // same L_i = 32
  const double ltf = 32.0;
  CHECK(a1 - a0 ==
        doctest::Approx(6.0 * ltf + 15.0 * 16 * std::log2(16.0)).epsilon(1e-12));
}

TEST_CASE("crossover thresholds reproduce the reference operating point") {
  const CrossoverThresholds th = crossover_thresholds(60, 48, 128, 4, M_PI);
  CHECK(th.bounds_valid);
  CHECK(th.dunder_t == doctest::Approx(29.5).epsilon(0.1 / 29.5));
  CHECK(th.omegaunder_f / M_PI == doctest::Approx(0.27).epsilon(0.01 / 0.27));
  CHECK(std::abs(th.dunder_tf - (-0.695)) < 0.01);
  CHECK(std::abs(th.omegaunder_tf / M_PI - 0.06) < 0.01);
}

TEST_CASE("threshold directions agree with the flop counts") {
  const int L = 60, M = 48, Q = 128;
  const CrossoverThresholds th = crossover_thresholds(L, M, Q, 4, M_PI);

  // case T: above Dunder_t the FFT variant is cheaper
  for (int D = static_cast<int>(th.dunder_t) + 1; D < static_cast<int>(th.dunder_t) + 40;
       D += 7)
    CHECK(flops_direct_per_device(Case::T, L, M, D, 0.0, 1) >
          flops_fft_per_device(Case::T, L, M, D, 0.0, 1));
  // below Dbar_t the direct variant is cheaper
  for (int D = 0; D <= static_cast<int>(th.dbar_t); ++D)
    CHECK(flops_direct_per_device(Case::T, L, M, D, 0.0, 1) <
          flops_fft_per_device(Case::T, L, M, D, 0.0, 1));

  // case F directions
  for (double om = th.omegaunder_f * 1.05; om <= M_PI; om += 0.1)
    CHECK(flops_direct_per_device(Case::F, L, M, 0, om, Q) >
          flops_fft_per_device(Case::F, L, M, 0, om, Q));
  for (double om = th.omegabar_f * 0.95; om > 0.01 * M_PI; om *= 0.5)
    CHECK(flops_direct_per_device(Case::F, L, M, 0, om, Q) <
          flops_fft_per_device(Case::F, L, M, 0, om, Q));

  // case TF: the "larger" sufficient conditions
  for (int D = std::max(0, static_cast<int>(th.dunder_tf) + 1); D < 10; D += 2)
    CHECK(flops_direct_per_device(Case::TF, L, M, D, M_PI, Q) >
          flops_fft_per_device(Case::TF, L, M, D, M_PI, Q));
}

TEST_CASE("flop counts are monotone in each dimension") {
  for (const Case c : {Case::T, Case::F, Case::TF}) {
    const int D = has_sto(c) ? 3 : 0;
    const double Om = has_cfo(c) ? 0.8 * M_PI : 0.0;
    for (auto f : {flops_direct_per_device, flops_fft_per_device}) {
      CHECK(f(c, 30, 8, D, Om, 32) <= f(c, 40, 8, D, Om, 32));
      CHECK(f(c, 30, 8, D, Om, 32) <= f(c, 30, 16, D, Om, 32));
      if (has_sto(c)) CHECK(f(c, 30, 8, D, Om, 32) <= f(c, 30, 8, D + 2, Om, 32));
      if (has_cfo(c)) CHECK(f(c, 30, 8, D, Om, 32) <= f(c, 30, 8, D, Om, 64));
    }
  }
}

TEST_CASE("asymptotic orders and dominance") {
  // case T at s = 2: equal orders
  CHECK(compare_orders(Case::T, 2.0, 1.0) == OrderComparison::Equal);
  // case T at s = 0.5: FFT order higher
  CHECK(compare_orders(Case::T, 0.5, 1.0) == OrderComparison::FftHigher);
  // case F at s = 1, q = 2: FFT order lower
  CHECK(compare_orders(Case::F, 1.0, 2.0) == OrderComparison::FftLower);

  const OrderDescriptor t_fft = asymptotic_order(Case::T, Strategy::Fft, 0.5, 1.0);
  CHECK(t_fft.exponent == 2.0);  // 1 + max(1, 0.5)
  CHECK(t_fft.log_factor);
  const OrderDescriptor t_fft2 = asymptotic_order(Case::T, Strategy::Fft, 2.0, 1.0);
  CHECK(t_fft2.exponent == 3.0);
  CHECK(!t_fft2.log_factor);
  const OrderDescriptor f_dir = asymptotic_order(Case::F, Strategy::Direct, 1.0, 2.0);
  CHECK(f_dir.exponent == 4.0);  // 1 + q + max(1, s)
  const OrderDescriptor f_fft = asymptotic_order(Case::F, Strategy::Fft, 1.0, 2.0);
  CHECK(f_fft.exponent == 2.0);  // 1 + max(1, q - 1)
  const OrderDescriptor tf_fft = asymptotic_order(Case::TF, Strategy::Fft, 1.0, 3.0);
  CHECK(tf_fft.log_factor);
  CHECK(tf_fft.log_scales_with_sto);
}

TEST_CASE("strategy recommendation") {
  CHECK(recommend_strategy(Case::T, 60, 48, 128, 40, 0.0).strategy == Strategy::Fft);
  const StrategyChoice f_band = recommend_strategy(Case::F, 60, 48, 128, 0, 0.1 * M_PI);
  CHECK(f_band.strategy == Strategy::Direct);
  CHECK(f_band.in_band);
  const StrategyChoice f_small = recommend_strategy(Case::F, 60, 48, 128, 0, 0.01 * M_PI);
  CHECK(f_small.strategy == Strategy::Direct);
  CHECK(!f_small.in_band);
  CHECK(recommend_strategy(Case::TF, 60, 48, 128, 4, M_PI).strategy == Strategy::Fft);
}

TEST_CASE("flop primitives") {
  CHECK(FlopPrimitives::psi_op(8) == 64.0);
  CHECK(FlopPrimitives::hadamard(8) == 48.0);
  CHECK(FlopPrimitives::inner_product(8) == 62.0);
  CHECK(FlopPrimitives::sum_entries(8) == 14.0);
  CHECK(FlopPrimitives::fft(8) == 120.0);
  CHECK(FlopPrimitives::symmetric_triple_rank_one(8) == 672.0);
}
