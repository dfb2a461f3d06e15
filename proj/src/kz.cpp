#include "thinspec/kz.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace thinspec {

RegimeLabel classify_regime(double t, double t0, double t_hat) {
    if (!(t0 > 0.0) || !(t_hat > 0.0))
        throw std::domain_error("classify_regime: t0 and t_hat must be positive");
    if (t < t0)
        throw std::domain_error("classify_regime: t < t0 lies before the schedule start");
    if (t0 >= t_hat) return RegimeLabel::Adiabatic;
    return (t < t_hat) ? RegimeLabel::Impulse : RegimeLabel::PostFreezeOut;
}

double relaxation_time(const ModelParams& p, double t) {
    p.validate();
    if (!(t > 0.0)) throw std::domain_error("relaxation_time: t must be positive");
    return p.hbar / std::sqrt(p.J * p.delta * t);
}

double frozen_defect_density(const ModelParams& p, double t) {
    p.validate();
    const double t0 = p.t0();
    if (t < t0)
        throw std::domain_error("frozen_defect_density: t < t0 lies before the schedule start");
    const double t_hat = freeze_out_time(p);
    if (t0 >= t_hat) return 0.0;  // no impulse stage: the state follows adiabatically
    const double rho = std::sqrt(t0 / std::min(t, t_hat));
    return 1.0 - 8.0 * std::pow(rho, 1.5) / std::pow(1.0 + rho, 3);
}

double defect_saturation(const ModelParams& p) {
    // For slow starts (t0 >= t_hat) the impulse stage is empty and the
    // saturation value is 0; t_hat itself then lies before the schedule
    // start, so evaluate at the later of the two times.
    return frozen_defect_density(p, std::max(freeze_out_time(p), p.t0()));
}

DefectTrace defect_trace(const ModelParams& p, double t_end, int samples) {
    p.validate();
    const double t0 = p.t0();
    if (!(t_end >= t0)) throw std::domain_error("defect_trace: t_end must be >= t0");
    if (samples < 2) throw std::domain_error("defect_trace: need at least 2 samples");
    DefectTrace out;
    out.D_sat = defect_saturation(p);
    out.t0_over_that = t0 / freeze_out_time(p);
    out.D.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double t = t0 + (t_end - t0) * static_cast<double>(i) / (samples - 1);
        out.D.push(t, frozen_defect_density(p, t));
    }
    return out;
}

double adiabaticity_bound(const ModelParams& p) {
    p.validate();
    if (!(p.H0 > 0.0)) throw std::domain_error("adiabaticity_bound: H0 must be positive");
    return std::sqrt(p.H0 * p.H0 * p.H0 * p.J) / p.hbar;
}

double dynamical_phase(int n, double t, double t_hat) {
    if (n < 1 || n % 2 == 0)
        throw std::domain_error("dynamical_phase: n must be an odd positive integer");
    if (!(t_hat > 0.0)) throw std::domain_error("dynamical_phase: t_hat must be positive");
    if (t < t_hat)
        throw std::domain_error("dynamical_phase: defined only after freeze-out (t >= t_hat)");
    return (2.0 / 3.0) * (n + 0.5) * (std::pow(t / t_hat, 1.5) - 1.0);
}

std::vector<double> recursion_times(double t_hat, int k_max) {
    if (!(t_hat > 0.0)) throw std::domain_error("recursion_times: t_hat must be positive");
    if (k_max < 0) throw std::domain_error("recursion_times: k_max must be >= 0");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
        out.push_back(std::pow(1.0 + 1.5 * M_PI * k, 2.0 / 3.0) * t_hat);
    return out;
}

KzState kz_state_at(const ModelParams& p, double t, int n_max) {
    p.validate();
    if (!(p.H0 > 0.0)) throw std::domain_error("kz_state_at: H0 must be positive");
    const double t_hat = freeze_out_time(p);
    if (t < t_hat)
        throw std::domain_error("kz_state_at: defined only after freeze-out (t >= t_hat)");

    constexpr int kMaxOrder = 4001;
    constexpr double kAutoWeight = 1.0 - 1e-8;
    if (n_max != 0 && (n_max < 1 || n_max % 2 == 0 || n_max > kMaxOrder))
        throw std::domain_error("kz_state_at: n_max must be 0 (auto) or an odd order <= 4001");

    // Frozen initial ground state expanded over the freeze-out basis on the
    // extended ramp H = delta t (the plateau before t0 only fixes the frozen
    // width, so the construction is meaningful for any t0 > 0). The
    // closed-form recursion is exact here (both widths real); the quadrature
    // path is cross-validated against it in the unit tests.
    GaussianHermiteState initial{1, {static_omega(p, p.H0), 0.0}, 0.0};
    const double basis_hat = static_omega(p, p.delta * t_hat);

    int order = n_max;
    SnapshotExpansion ex;
    if (order == 0) {
        order = 63;
        for (;;) {
            ex = expand_in_snapshot_basis(initial, basis_hat, order, ExpandMethod::Recurrence);
            if (ex.weight() >= kAutoWeight || order >= kMaxOrder) break;
            order = std::min(kMaxOrder, 2 * order + 1);
        }
    } else {
        ex = expand_in_snapshot_basis(initial, basis_hat, order, ExpandMethod::Recurrence);
    }

    KzState out;
    out.t = t;
    out.H = p.delta * t;
    // The weight can exceed 1 by a rounding ulp; the deficit is a mass.
    out.truncation_deficit = std::max(0.0, 1.0 - ex.weight());
    out.coeffs.basis_omega = static_omega(p, out.H);
    out.coeffs.c.resize(ex.c.size());
    for (std::size_t j = 0; j < ex.c.size(); ++j) {
        const int n = static_cast<int>(2 * j + 1);
        const double phase = dynamical_phase(n, t, t_hat);
        out.coeffs.c[j] = ex.c[j] * std::polar(1.0, -phase);
    }
    return out;
}

double kz_fidelity(const KzState& state, double omega_ref) {
    if (!(omega_ref > 0.0)) throw std::domain_error("kz_fidelity: omega_ref must be positive");
    if (state.coeffs.c.empty()) throw std::domain_error("kz_fidelity: empty state");
    const int order = static_cast<int>(2 * state.coeffs.c.size() - 1);
    GaussianHermiteState ref{1, {omega_ref, 0.0}, 0.0};
    const SnapshotExpansion d =
        expand_in_snapshot_basis(ref, state.coeffs.basis_omega, order, ExpandMethod::Recurrence);
    std::complex<double> amp = 0.0;
    for (std::size_t j = 0; j < state.coeffs.c.size(); ++j)
        amp += std::conj(d.c[j]) * state.coeffs.c[j];
    return std::norm(amp);
}

double kz_reconstruction_fidelity(const ModelParams& p, const KzState& state) {
    const double H_rec = reconstruction_field(p, state.H);
    return kz_fidelity(state, static_omega(p, H_rec));
}

}  // namespace thinspec
