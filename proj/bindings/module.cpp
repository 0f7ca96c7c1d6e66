#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gfdet/complexity.hpp"
#include "gfdet/harness.hpp"
#include "gfdet/sync_detector.hpp"
#include "gfdet/verify.hpp"

namespace py = pybind11;
using namespace gfdet;

namespace {

RunConfig config_from_dict(const py::dict& d) {
  std::map<std::string, std::string> kv;
  for (const auto& item : d)
    kv[py::str(item.first).cast<std::string>()] = py::str(item.second).cast<std::string>();
  return parse_config(kv);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "maximum-likelihood device activity detection under Rician fading";

  py::register_exception<numeric_error>(m, "NumericError");

  py::enum_<Case>(m, "Case")
      .value("SYNC", Case::Sync)
      .value("T", Case::T)
      .value("F", Case::F)
      .value("TF", Case::TF);

  py::enum_<Strategy>(m, "Strategy")
      .value("DIRECT", Strategy::Direct)
      .value("FFT", Strategy::Fft);

  py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("N", &SystemParams::N)
      .def_readwrite("M", &SystemParams::M)
      .def_readwrite("L", &SystemParams::L)
      .def_readwrite("D", &SystemParams::D)
      .def_readwrite("Omega", &SystemParams::Omega)
      .def_readwrite("Q", &SystemParams::Q)
      .def_readwrite("noise_var", &SystemParams::noise_var)
      .def_readwrite("active_prob", &SystemParams::active_prob)
      .def("signal_rows", &SystemParams::signal_rows)
      .def("validate", &SystemParams::validate);

  py::class_<ChannelStatistics>(m, "ChannelStatistics")
      .def(py::init<>())
      .def_readwrite("g", &ChannelStatistics::g)
      .def_readwrite("kappa", &ChannelStatistics::kappa)
      .def_readwrite("Hbar", &ChannelStatistics::Hbar);

  py::class_<PilotBook>(m, "PilotBook")
      .def(py::init<>())
      .def_readwrite("P", &PilotBook::P);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("a_true", &Scenario::a_true)
      .def_readonly("t_true", &Scenario::t_true)
      .def_readonly("omega_true", &Scenario::omega_true)
      .def_readonly("Htilde", &Scenario::Htilde)
      .def_readonly("Z", &Scenario::Z)
      .def_readonly("seed", &Scenario::seed);

  py::class_<OffsetGrid::Candidate>(m, "Candidate")
      .def_readonly("t", &OffsetGrid::Candidate::t)
      .def_readonly("q", &OffsetGrid::Candidate::q)
      .def_readonly("omega", &OffsetGrid::Candidate::omega);

  py::class_<OffsetGrid>(m, "OffsetGrid")
      .def("__len__", &OffsetGrid::size)
      .def("at", &OffsetGrid::at, py::arg("flat_index"));

  py::class_<DetectionInput>(m, "DetectionInput")
      .def(py::init<>())
      .def_readwrite("case_id", &DetectionInput::kase)
      .def_readwrite("params", &DetectionInput::params)
      .def_readwrite("pilots", &DetectionInput::pilots)
      .def_readwrite("stats", &DetectionInput::stats)
      .def_readwrite("Y", &DetectionInput::Y);

  py::class_<SyncResult>(m, "SyncResult")
      .def_readonly("a_hat", &SyncResult::a_hat)
      .def_readonly("objective_trace", &SyncResult::objective_trace)
      .def_readonly("iterations", &SyncResult::iterations)
      .def_readonly("converged", &SyncResult::converged);

  py::class_<AsyncResult>(m, "AsyncResult")
      .def_readonly("a_hat", &AsyncResult::a_hat)
      .def_readonly("cand_hat", &AsyncResult::cand_hat)
      .def_readonly("t_hat", &AsyncResult::t_hat)
      .def_readonly("omega_hat", &AsyncResult::omega_hat)
      .def_readonly("objective_trace", &AsyncResult::objective_trace)
      .def_readonly("iterations", &AsyncResult::iterations)
      .def_readonly("converged", &AsyncResult::converged)
      .def_readonly("strategy_used", &AsyncResult::strategy_used);

  py::class_<CrossoverThresholds>(m, "CrossoverThresholds")
      .def_readonly("dbar_t", &CrossoverThresholds::dbar_t)
      .def_readonly("dunder_t", &CrossoverThresholds::dunder_t)
      .def_readonly("omegabar_f", &CrossoverThresholds::omegabar_f)
      .def_readonly("omegaunder_f", &CrossoverThresholds::omegaunder_f)
      .def_readonly("dbar_tf", &CrossoverThresholds::dbar_tf)
      .def_readonly("omegabar_tf", &CrossoverThresholds::omegabar_tf)
      .def_readonly("dunder_tf", &CrossoverThresholds::dunder_tf)
      .def_readonly("omegaunder_tf", &CrossoverThresholds::omegaunder_tf)
      .def_readonly("bounds_valid", &CrossoverThresholds::bounds_valid);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("theta_grid", &SweepResult::theta_grid)
      .def_readonly("error_prob", &SweepResult::error_prob)
      .def_readonly("std_err", &SweepResult::std_err)
      .def_readonly("theta_star", &SweepResult::theta_star)
      .def_readonly("error_star", &SweepResult::error_star);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("sweep", &RunResult::sweep)
      .def_readonly("digest", &RunResult::digest)
      .def_readonly("median_iterations", &RunResult::median_iterations)
      .def_readonly("median_time_ns", &RunResult::median_time_ns)
      .def_readonly("n_failed", &RunResult::n_failed)
      .def_readonly("strategy_used", &RunResult::strategy_used);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("case_id", &RunConfig::kase)
      .def_readonly("params", &RunConfig::params)
      .def_readonly("kappa", &RunConfig::kappa)
      .def_readonly("n_trials", &RunConfig::n_trials)
      .def_readonly("master_seed", &RunConfig::master_seed);

  // generators
  m.def("gen_pilots", [](Rng& rng, int L, int N) { return gen_pilots(rng, L, N).P; },
        py::arg("rng"), py::arg("L"), py::arg("N"));
  m.def("gen_los", &gen_los, py::arg("rng"), py::arg("M"), py::arg("N"));
  m.def("gen_scenario", &gen_scenario, py::arg("rng"), py::arg("case_id"), py::arg("params"));
  m.def("tau", &tau, py::arg("omega"), py::arg("rows"));
  m.def("equivalent_pilot", &equivalent_pilot, py::arg("case_id"), py::arg("p"), py::arg("t"),
        py::arg("omega"), py::arg("D"));
  m.def(
      "synthesize_received",
      [](Case c, const SystemParams& p, const PilotBook& pb, const ChannelStatistics& st,
         const Scenario& sc) { return synthesize_received(c, p, pb, st, sc).Y; },
      py::arg("case_id"), py::arg("params"), py::arg("pilots"), py::arg("stats"),
      py::arg("scenario"));
  m.def("offset_grid", &offset_grid, py::arg("case_id"), py::arg("D"), py::arg("Omega"),
        py::arg("Q"));
  m.def("uniform_stats", &uniform_stats, py::arg("Hbar"), py::arg("g"), py::arg("kappa"));
  m.def("random_input", &random_input, py::arg("case_id"), py::arg("params"),
        py::arg("kappa"), py::arg("seed"));

  // detection
  m.def("run_sync", &run_sync, py::arg("input"), py::arg("epsilon") = 1e-7,
        py::arg("max_iters") = 1000);
  m.def("run_async", &run_async, py::arg("input"), py::arg("grid"), py::arg("strategy"),
        py::arg("epsilon") = 1e-7, py::arg("max_iters") = 1000);
  m.def("negloglik", &negloglik, py::arg("input"), py::arg("a"), py::arg("t"),
        py::arg("omega"));

  // evaluation
  m.def("binarize", &binarize, py::arg("a_hat"), py::arg("theta"));
  m.def("error_probability", &error_probability, py::arg("a_true"), py::arg("a_bin"));
  m.def("parse_config", &config_from_dict, py::arg("settings"));
  m.def("run_trials", &run_trials, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  // complexity model
  m.def("flops_direct_per_device", &flops_direct_per_device, py::arg("case_id"), py::arg("L"),
        py::arg("M"), py::arg("D"), py::arg("Omega"), py::arg("Q"));
  m.def("flops_fft_per_device", &flops_fft_per_device, py::arg("case_id"), py::arg("L"),
        py::arg("M"), py::arg("D"), py::arg("Omega"), py::arg("Q"));
  m.def("crossover_thresholds", &crossover_thresholds, py::arg("L"), py::arg("M"),
        py::arg("Q"), py::arg("D"), py::arg("Omega"));
  m.def(
      "recommend_strategy",
      [](Case c, int L, int M, int Q, int D, double Omega) {
        const StrategyChoice sc = recommend_strategy(c, L, M, Q, D, Omega);
        return py::make_tuple(sc.strategy, sc.in_band);
      },
      py::arg("case_id"), py::arg("L"), py::arg("M"), py::arg("Q"), py::arg("D"),
      py::arg("Omega"));

  m.attr("__version__") = "0.1.0";
}
