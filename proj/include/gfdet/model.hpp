#pragma once

#include "gfdet/rng.hpp"
#include "gfdet/types.hpp"

namespace gfdet {

/// Gaussian pilot book: each entry i.i.d. CN(0, 1).
PilotBook gen_pilots(Rng& rng, int L, int N);

/// Normalized LoS matrix: column n is (e^{j(m-1)phi_n})_m with phi_n ~ U[0, 2pi).
MatrixXcd gen_los(Rng& rng, int M, int N);

/// Draws activities, offsets, NLoS coefficients, and noise for one trial.
/// Offsets the case disallows are forced to zero.
Scenario gen_scenario(Rng& rng, Case c, const SystemParams& params);

/// Phase-ramp vector (e^{j(l-1)omega})_{l=1..rows}.
VectorXcd tau(double omega, int rows);

/// Equivalent transmitted pilot of one device after applying its offset:
/// zero-padding shift for STO, phase ramp for CFO.
VectorXcd equivalent_pilot(Case c, const VectorXcd& p, int t, double omega, int D);

/// Equivalent pilot matrix P_i(x), one column per device.
MatrixXcd equivalent_pilot_matrix(Case c, const PilotBook& pilots, const VectorXi& t,
                                  const VectorXd& omega, int D);

/// Received signal assembled device by device (summation form).
ReceivedSignal synthesize_received(Case c, const SystemParams& params, const PilotBook& pilots,
                                   const ChannelStatistics& stats, const Scenario& scenario);

/// Same signal in the compact matrix form; used to cross-check synthesize_received.
MatrixXcd received_compact_form(Case c, const SystemParams& params, const PilotBook& pilots,
                                const ChannelStatistics& stats, const Scenario& scenario);

/// Candidate set for the case; cardinality follows the closed form
/// D+1 (T), Q + 1(Omega != pi)(2 floor(Q Omega / 2pi) + 1 - Q) (F), product (TF).
OffsetGrid offset_grid(Case c, int D, double Omega, int Q);

/// Cardinality closed form, for checking enumeration against it.
int offset_grid_cardinality(Case c, int D, double Omega, int Q);

/// Statistics with g_n = g, kappa_n = kappa for all devices.
ChannelStatistics uniform_stats(MatrixXcd Hbar, double g, double kappa);

}  // namespace gfdet
