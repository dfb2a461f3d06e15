#pragma once

// Snapshot (instantaneous) eigenstates of the continuum Hamiltonian at fixed
// field H: half-line Gaussian-Hermite states of odd order, the dual
// harmonic ladder sqrt(JH)(n + 1/2), Gaussian overlaps, and expansions of a
// Gaussian ground state in a snapshot basis.

#include <complex>
#include <vector>

#include "thinspec/model.hpp"

namespace thinspec {

// Half-line Gaussian-Hermite state: order n (odd), complex width omega with
// Re(omega) > 0, accumulated quantal phase phi. The amplitude is
//   Psi_n(S) = sqrt(1/(2^{n-1} n!)) (Re w/pi)^{1/4} e^{-i(n+1/2) phi}
//              H_n(sqrt(Re w) S) e^{-S^2 w/2},   S >= 0,
// which is exactly normalized on [0, inf) for odd n.
struct GaussianHermiteState {
    int n = 1;
    std::complex<double> omega{1.0, 0.0};
    double phi = 0.0;

    void validate() const;  // throws std::domain_error on even n or Re(omega) <= 0
};

// Snapshot ground state (n = 1, real width omega_S(H), zero phase).
struct StaticGroundState {
    GaussianHermiteState state;
    double H = 0.0;
};

// Order-n snapshot eigenstate at field H; even n is a domain error (the
// half-line boundary condition removes even orders).
GaussianHermiteState snapshot_eigenstate(const ModelParams& p, double H, int n);

StaticGroundState static_ground_state(const ModelParams& p, double H);

// Harmonic dual-ladder energy sqrt(J H) (n + 1/2) of the order-n snapshot
// state.
double dual_thin_energy(const ModelParams& p, double H, int n);

// Ground-state order parameter N e^{-omega_S(H)}.
double static_order_parameter(const ModelParams& p, double H);

// Squared overlap |<1_{w1}|1_{w2}>|^2 = 8 (Re w1 Re w2)^{3/2} / |conj(w1)+w2|^3
// of two normalized n = 1 states (phases drop out of the modulus).
double overlap_n1(std::complex<double> bra_omega, std::complex<double> ket_omega);

// Pointwise amplitude of the state at coordinate S >= 0.
std::complex<double> state_amplitude(const GaussianHermiteState& s, double S);

// Half-line integration cutoff adequate for states whose smallest Gaussian
// width parameter is min_re_omega (tail mass below ~1e-31).
double quadrature_cutoff(double min_re_omega);

enum class ExpandMethod {
    Quadrature,  // direct half-line integrals (reference path)
    Recurrence,  // closed-form coefficient recursion (validated fast path)
};

// Expansion of an n = 1 state over the real-width snapshot basis: c[j] is
// the coefficient of the order n = 2j + 1 basis state. Even orders vanish
// identically on the half line and are not stored.
struct SnapshotExpansion {
    double basis_omega = 1.0;
    std::vector<std::complex<double>> c;

    double weight() const;  // sum of |c_n|^2
    std::complex<double> coefficient(int n) const;  // structural 0 for even n
};

// state.n must be 1 (the evolved/initial ground state is always order 1).
// n_max is the largest odd order retained.
SnapshotExpansion expand_in_snapshot_basis(const GaussianHermiteState& state,
                                           double basis_omega, int n_max,
                                           ExpandMethod method = ExpandMethod::Quadrature);

}  // namespace thinspec
