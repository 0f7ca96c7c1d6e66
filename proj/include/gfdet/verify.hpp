#pragma once

#include <string>
#include <vector>

#include "gfdet/harness.hpp"

namespace gfdet {

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::string detail;  // first failure description
  bool passed() const { return failures == 0; }
};

/// Random but reproducible detection instance with g_n = 1, kappa_n = kappa.
DetectionInput random_input(Case c, const SystemParams& params, double kappa,
                            std::uint64_t seed);

/// Oracle suites: Sherman-Morrison round trips, FFT identities, closed-form
/// update optimality, direct/FFT strategy equivalence, incremental-state
/// integrity. quick shrinks repetition counts.
std::vector<SuiteResult> run_verification(bool quick, std::uint64_t seed);

bool all_passed(const std::vector<SuiteResult>& suites);

}  // namespace gfdet
