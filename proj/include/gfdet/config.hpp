#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gfdet/types.hpp"

namespace gfdet {

/// Full description of one simulation run. Field defaults are the reference
/// operating point (N=1000, p=0.08, sigma^2=2, M=48, L=60, kappa=-10 dB,
/// D=4, Omega=pi, Q=128); offsets apply only to the cases that use them.
struct RunConfig {
  Case kase = Case::Sync;
  SystemParams params;
  double kappa = 0.1;  // linear Rician factor
  int n_trials = 3000;
  std::uint64_t master_seed = 1;
  std::string strategy = "auto";  // direct | fft | auto
  double epsilon = 1e-7;
  int max_iters = 1000;
  int threads = 1;
  std::string out_csv;
  std::string out_json;

  Strategy resolve_strategy() const;
  void validate() const;
};

/// Parses "pi", "<x>pi", or "0"; rejects bare non-zero numbers so configs
/// never carry float-pi literals.
double parse_omega_spec(const std::string& s);

std::string format_omega(double omega);  // inverse of the above, e.g. "0.5pi"

/// Builds a config from flat key-value pairs (file contents and flag
/// overrides merged by the caller; later values win). Unknown keys and
/// out-of-range or case-inconsistent values raise std::invalid_argument
/// naming the field. strict_case = false skips the case/offset coupling
/// checks (the complexity calculator evaluates thresholds at any point).
RunConfig parse_config(const std::map<std::string, std::string>& kv, bool strict_case = true);

/// Reads a flat JSON object file into key-value form.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace gfdet
