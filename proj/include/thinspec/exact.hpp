#pragma once

// Exact Gaussian-state evolution under the continuum Hamiltonian with the
// linear ramp H(t) = delta t. The state stays in the family
// psi_t(S) ~ S exp(-omega(t) S^2 / 2 - i (3/2) phi(t)); omega obeys a Riccati
// flow that is integrated through its equivalent linear system
//   y1' = y2 / m(t),   y2' = -k y1,   omega = -i y2 / (hbar y1),
// which stays regular at the width oscillation peaks where the direct
// Riccati form is stiff.

#include <complex>
#include <vector>

#include "thinspec/model.hpp"
#include "thinspec/series.hpp"
#include "thinspec/static_spectrum.hpp"

namespace thinspec {

// pi / (3^{1/3} Gamma(2/3)^2): envelope constant of the late-time width
// combs. Re omega at the narrow-state comb approaches omega_S(H(t)) *
// sqrt(t_hat/t0) / mu; at the classical-return comb it approaches
// mu sqrt(t0/t_hat) * omega_S(H(t)).
inline constexpr double kCombEnvelopeMu = 1.1879453751046214;

struct RiccatiState {
    double t = 0.0;
    std::complex<double> omega{0.0, 0.0};
    double phi = 0.0;
};

// d(omega)/dt = i [2J/(N hbar) - N H(t) omega^2 / (2 hbar)].
std::complex<double> riccati_rhs(const ModelParams& p, double t, std::complex<double> omega);

// Zero crossing of Im(omega): alternately a classical return (- to +,
// Re omega minimal, the state matches the classical oscillator envelope) and
// a narrow-state instant (+ to -, Re omega maximal).
struct WidthEvent {
    double t = 0.0;
    bool narrow = false;  // true: Re omega maximum; false: classical return
    std::complex<double> omega{0.0, 0.0};
    double phi = 0.0;
};

struct ExactOptions {
    double rtol = 1e-10;
    bool frozen_schedule = false;  // hold H(t) = H0 (stationarity control)
    bool record_events = true;
    long max_steps = 20000000;
};

struct ExactSeries {
    ModelParams params;
    std::vector<RiccatiState> samples;  // at the requested output times
    std::vector<WidthEvent> events;     // Im(omega) sign changes, refined
    double min_re_omega = 0.0;          // positivity certificate over the run
    long accepted = 0;
    long rejected = 0;
};

// Integrates from t0 to t_end, sampling at out_grid (must be increasing,
// within [t0, t_end]). Step-size scaling is built from per-component relative
// magnitudes only, so trajectories for different N at fixed N^2 H0 / J and
// fixed J delta are bitwise-comparable.
ExactSeries evolve_exact(const ModelParams& p, double t_end,
                         const std::vector<double>& out_grid, const ExactOptions& opts = {});

// Direct integration of the Riccati form (test reference; stiff near the
// narrow-state comb, where the linear form is authoritative).
ExactSeries evolve_riccati_reference(const ModelParams& p, double t_end,
                                     const std::vector<double>& out_grid,
                                     const ExactOptions& opts = {});

// psi(S) for the excitation-n Gaussian-Hermite state carried by s.
std::complex<double> wavefunction_at(const RiccatiState& s, int n, double S);

// <H(t)> for the n = 1 state of width s.omega at field H (exact Gaussian
// moments): (3/4) [N H |omega|^2 / (2 Re omega) + 2 J / (N Re omega)].
double state_energy(const ModelParams& p, const RiccatiState& s, double H);

// Reference widths for fidelity traces.
enum class FidelityRef {
    Instantaneous,    // omega_S(H(t))
    Renormalized,     // omega_S(H_R(t)), H_R = H H0 / [hbar^2 delta^2/(2J)]^{1/3}
    ClassicalReturn,  // mu sqrt(t0/t_hat) omega_S(H(t))
};
double reference_width(const ModelParams& p, double t, FidelityRef ref);

// |<u_1(reference width) | psi>|^2 via the two-width overlap closed form.
double classical_fidelity(const ModelParams& p, const RiccatiState& s, FidelityRef ref);

// Late-time comb predictions t_hat (3 k pi / 2 + c)^{2/3}, c = 13 pi / 8 for
// the narrow-state comb and 7 pi / 8 for the classical-return comb, k >= 0.
std::vector<double> predicted_narrow_times(const ModelParams& p, int k_max);
std::vector<double> predicted_return_times(const ModelParams& p, int k_max);

struct CombReport {
    std::vector<double> detected_return;      // classical-return instants (t_I)
    std::vector<double> detected_narrow;      // narrow-state instants (t_R)
    std::vector<double> predicted_return;     // k = 0..k_max
    std::vector<double> predicted_narrow;
    std::vector<double> deviation_return;     // |det - pred| / pred, index-matched
    std::vector<double> deviation_narrow;
    // Local maxima of the renormalized-width fidelity trace; these track the
    // narrow-state comb (where the state is closest to a static-looking
    // ground state), not the classical-return comb.
    std::vector<double> renormalized_peak_times;
    std::vector<double> renormalized_peak_values;
};

// Uses refined Im(omega) crossings when the series recorded events; falls
// back to sample-grid maxima of Re omega (prominence >= 10x the trace
// median, parabolic refinement) otherwise. Reports however many events the
// series covers, up to k_max + 1 per comb.
CombReport detect_comb(const ModelParams& p, const ExactSeries& series, int k_max);

// Proxy order-parameter trace N * classical_fidelity(ref) over the series
// samples. With ref = ClassicalReturn (default) its maxima mark the
// classical-return comb, where the literal two-sublattice order parameter
// attains its recurrences.
TimeSeries order_parameter_trace(const ModelParams& p, const ExactSeries& series,
                                 FidelityRef ref = FidelityRef::ClassicalReturn);

}  // namespace thinspec
