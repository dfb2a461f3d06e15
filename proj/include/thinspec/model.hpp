#pragma once

// Core model: shared parameter definitions, unit conventions, derived scales,
// and the linear field schedule H(t) = delta * t.
//
// Internal unit system: hbar = 1 by default, with J and delta carried
// explicitly so that scenarios with t_hat != 1 are exercised. All types here
// are immutable values after construction and safe to share across threads.

#include <cmath>
#include <stdexcept>

namespace thinspec {

// Physical constants defining one scenario of the driven antiferromagnet.
//
// The stored inputs are (J, delta, H0, N, hbar); the schedule start time
// t0 = H0/delta is always derived, never stored, so there is a single source
// of truth for the H0 -> 0 limit (the limits delta -> 0 and H0 -> 0 do not
// commute, so H0 is the primary knob).
struct ModelParams {
    double J = 1.0;      // exchange energy, > 0 (antiferromagnetic)
    double delta = 1.0;  // ramp rate dH/dt, > 0
    double H0 = 0.0;     // initial staggered field, >= 0
    int N = 100;         // number of lattice sites, even, >= 4
    double hbar = 1.0;   // reduced Planck constant

    // Throws std::domain_error if any invariant is violated. `for_ed`
    // additionally requires N divisible by 2 so S_A = S_B = N/4 is a valid
    // (possibly half-integer) spin quantum number.
    void validate(bool for_ed = false) const;

    double t0() const { return H0 / delta; }  // schedule start time
};

// H(t) = delta * t for t >= t0; throws std::domain_error before the
// schedule start ("before schedule start").
double field_at(const ModelParams& p, double t);

// Freeze-out time t_hat = (hbar^2 / (J * delta))^(1/3).
double freeze_out_time(const ModelParams& p);

// Dimensionless static ground-state width omega_S(H) = N^-1 sqrt(4 J / H).
// Strictly decreasing in H; diverges as H -> 0+. Throws for H <= 0.
double static_omega(const ModelParams& p, double H);

// Renormalized staggered field H_R = H * H0 / (hbar^2 delta^2 / (2J))^(1/3).
// Vanishes linearly as H0 -> 0. Throws for H <= 0.
double renormalized_field(const ModelParams& p, double H);

// Field whose snapshot ground state the phased adiabatic sum reconstructs at
// the recursion times: H * t0 / t_hat = H * H0 / (hbar^2 delta^2 / J)^(1/3).
// Differs from renormalized_field by the factor 2^(1/3) in the denominator;
// this is the self-consistent choice for which the reconstruction fidelity
// reaches 1 exactly (see kz.hpp).
double reconstruction_field(const ModelParams& p, double H);

// Convenient bundle of derived energy/time scales.
struct DerivedScales {
    ModelParams p;

    double t_hat() const { return freeze_out_time(p); }
    double omega_S(double H) const { return static_omega(p, H); }
    double E_thin_magnon() const { return p.J; }        // magnon gap
    double E_thin_tower() const { return p.J / p.N; }   // thin-spectrum spacing
    double E_thin_dual(double H) const { return std::sqrt(p.J * H); }
};

// Coefficients of the continuum Hamiltonian Pi^2/(2 m(t)) + k S^2/2 for the
// collective spin coordinate S, with conjugate momentum Pi.
struct ContinuumHamiltonian {
    ModelParams p;

    // effective mass m(t) = 2 hbar^2 / (N * H(t))
    double mass(double t) const {
        return 2.0 * p.hbar * p.hbar / (p.N * field_at(p, t));
    }
    // stiffness k = 2 J / N
    double stiffness() const { return 2.0 * p.J / p.N; }
    // classical frequency sqrt(k/m(t)) = sqrt(J * H(t)) / hbar
    double classical_frequency(double t) const {
        return std::sqrt(stiffness() / mass(t));
    }
};

}  // namespace thinspec
