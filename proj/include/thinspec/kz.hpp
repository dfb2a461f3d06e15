#pragma once

// Adiabatic-impulse (Kibble-Zurek) approximation: regime classification,
// frozen-state defect density, recursion times, dynamical phases, and the
// phased snapshot-basis superposition carried through the adiabatic stage.

#include <vector>

#include "thinspec/model.hpp"
#include "thinspec/series.hpp"
#include "thinspec/static_spectrum.hpp"

namespace thinspec {

enum class RegimeLabel { Adiabatic, Impulse, PostFreezeOut };

// Sharp classification in the (t, t0) plane; boundaries belong to the later
// regime. Throws on the unphysical region t < t0.
RegimeLabel classify_regime(double t, double t0, double t_hat);

// Characteristic relaxation time hbar / sqrt(J delta t); equals t_hat at
// t = t_hat.
double relaxation_time(const ModelParams& p, double t);

// Frozen-state defect density D(t) = 1 - 8 rho^{3/2} / (1 + rho)^3 with
// rho = sqrt(t0 / min(t, t_hat)); identically 0 when t0 >= t_hat (no impulse
// stage). Throws for t < t0.
double frozen_defect_density(const ModelParams& p, double t);

// Saturation value D(t_hat).
double defect_saturation(const ModelParams& p);

struct DefectTrace {
    TimeSeries D;            // D(t) on a uniform grid over [t0, t_end]
    double D_sat = 0.0;      // saturation value D(t_hat)
    double t0_over_that = 0.0;
};
DefectTrace defect_trace(const ModelParams& p, double t_end, int samples);

// Ramp-rate threshold delta* = sqrt(H0^3 J) / hbar; driving below it keeps
// the evolution adiabatic at this H0. The two limits delta -> 0 and
// H0 -> 0 do not commute: at fixed delta, D_sat -> 1 as H0 -> 0.
double adiabaticity_bound(const ModelParams& p);

// Omega_n(t) = (2/3)(n + 1/2)[(t/t_hat)^{3/2} - 1]; defined for t >= t_hat.
double dynamical_phase(int n, double t, double t_hat);

// t_k = (1 + 3 k pi / 2)^{2/3} t_hat for k = 0..k_max.
std::vector<double> recursion_times(double t_hat, int k_max);

// Phased superposition at time t >= t_hat: the initial ground state frozen
// through the impulse stage, expanded over the freeze-out snapshot basis,
// carried adiabatically with phases e^{-i Omega_n(t)} over the basis at H(t).
struct KzState {
    double t = 0.0;
    double H = 0.0;                    // instantaneous field at t
    SnapshotExpansion coeffs;          // phased c_n over basis omega_S(H)
    double truncation_deficit = 0.0;   // 1 - sum |c_n|^2
};

// n_max = 0 selects the smallest odd order with cumulative weight
// >= 1 - 1e-8, capped at 4001.
KzState kz_state_at(const ModelParams& p, double t, int n_max = 0);

// Squared overlap of the superposition with the n = 1 snapshot state of real
// width omega_ref.
double kz_fidelity(const KzState& state, double omega_ref);

// Fidelity against the ground state of the reconstruction field
// H(t) t0 / t_hat (exactly 1, minus truncation, at every recursion time).
double kz_reconstruction_fidelity(const ModelParams& p, const KzState& state);

}  // namespace thinspec
