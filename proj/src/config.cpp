#include "gfdet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gfdet/complexity.hpp"
#include "json.hpp"

namespace gfdet {

double parse_omega_spec(const std::string& s) {
  if (s == "0" || s == "0.0") return 0.0;
  if (s == "pi") return M_PI;
  const auto pos = s.find("pi");
  if (pos == std::string::npos || pos + 2 != s.size())
    throw std::invalid_argument("Omega must be '0', 'pi', or '<x>pi', got '" + s + "'");
  std::size_t used = 0;
  const double mult = std::stod(s.substr(0, pos), &used);
  if (used != pos) throw std::invalid_argument("Omega: bad multiplier in '" + s + "'");
  return mult * M_PI;
}

std::string format_omega(double omega) {
  if (omega == 0.0) return "0";
  if (omega == M_PI) return "pi";
  std::ostringstream os;
  os << omega / M_PI << "pi";
  return os.str();
}

Strategy RunConfig::resolve_strategy() const {
  if (strategy == "direct") return Strategy::Direct;
  if (strategy == "fft") return Strategy::Fft;
  if (strategy != "auto")
    throw std::invalid_argument("strategy must be direct|fft|auto, got '" + strategy + "'");
  if (kase == Case::Sync) return Strategy::Direct;
  return recommend_strategy(kase, params.L, params.M, params.Q, params.D, params.Omega).strategy;
}

void RunConfig::validate() const {
  params.validate(kase);
  if (kappa < 0.0) throw std::invalid_argument("kappa must be non-negative");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
  (void)resolve_strategy();
}

namespace {

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key + "': expected integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key + "': expected number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config field '" + key + "': expected integer, got '" + v + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::map<std::string, std::string>& kv, bool strict_case) {
  RunConfig cfg;
  const Case kase = case_from_string(kv.count("case") ? kv.at("case") : "sync");
  cfg.kase = kase;
  // offset defaults track the case
  cfg.params.D = has_sto(kase) ? 4 : 0;
  cfg.params.Omega = has_cfo(kase) ? M_PI : 0.0;

  bool kappa_db_set = false;
  bool kappa_lin_set = false;
  for (const auto& [key, value] : kv) {
    if (key == "case") {
    } else if (key == "N") {
      cfg.params.N = to_int(key, value);
    } else if (key == "M") {
      cfg.params.M = to_int(key, value);
    } else if (key == "L") {
      cfg.params.L = to_int(key, value);
    } else if (key == "D") {
      cfg.params.D = to_int(key, value);
    } else if (key == "Omega") {
      cfg.params.Omega = parse_omega_spec(value);
    } else if (key == "Q") {
      cfg.params.Q = to_int(key, value);
    } else if (key == "noise_var") {
      cfg.params.noise_var = to_double(key, value);
    } else if (key == "active_prob") {
      cfg.params.active_prob = to_double(key, value);
    } else if (key == "kappa_db") {
      cfg.kappa = std::pow(10.0, to_double(key, value) / 10.0);
      kappa_db_set = true;
    } else if (key == "kappa_linear") {
      cfg.kappa = to_double(key, value);
      kappa_lin_set = true;
    } else if (key == "n_trials") {
      cfg.n_trials = to_int(key, value);
    } else if (key == "seed") {
      cfg.master_seed = to_u64(key, value);
    } else if (key == "strategy") {
      cfg.strategy = value;
    } else if (key == "epsilon") {
      cfg.epsilon = to_double(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = to_int(key, value);
    } else if (key == "threads") {
      cfg.threads = to_int(key, value);
    } else if (key == "out_csv") {
      cfg.out_csv = value;
    } else if (key == "out_json") {
      cfg.out_json = value;
    } else {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
  }
  if (kappa_db_set && kappa_lin_set)
    throw std::invalid_argument("set exactly one of kappa_db / kappa_linear");
  if (strict_case)
    cfg.validate();
  return cfg;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a flat JSON object");
  std::map<std::string, std::string> kv;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string())
      kv[key] = value.get<std::string>();
    else if (value.is_number_integer())
      kv[key] = std::to_string(value.get<long long>());
    else if (value.is_number())
      kv[key] = [&] {
        std::ostringstream os;
        os.precision(17);
        os << value.get<double>();
        return os.str();
      }();
    else
      throw std::invalid_argument("config field '" + key + "' must be a string or number");
  }
  return kv;
}

}  // namespace gfdet
