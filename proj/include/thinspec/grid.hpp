#pragma once

// Brute-force oracle for the continuum dynamics: the time-dependent
// Schroedinger equation i hbar dpsi/dt = [-(hbar^2/(2 m(t))) d^2/dS^2 +
// (k/2) S^2] psi discretized on the half-line S in (0, S_max) with Dirichlet
// walls, a 4th-order 5-point Laplacian (antisymmetric ghost at S = 0), and
// norm-preserving Crank-Nicolson stepping with the mass at the step
// midpoint. Nothing here assumes the Gaussian solution family.

#include <complex>
#include <vector>

#include "thinspec/model.hpp"
#include "thinspec/static_spectrum.hpp"

namespace thinspec {

struct GridConfig {
    double S_max = 280.0;  // Dirichlet wall; interior nodes S_i = i h, h = S_max/(n_points+1)
    int n_points = 2799;   // interior node count
    double dt = 1e-5;      // base time step (shortened locally to hit samples)
    bool frozen_schedule = false;  // hold H(t) = H0 (stationarity control)
    // Runtime cutoff-adequacy gate: relative boundary amplitude
    // max_{last 3 nodes}|psi| / max|psi| above this aborts the run.
    double tail_gate = 1e-10;

    void validate() const;
    double h() const { return S_max / (n_points + 1); }
};

struct GridSeries {
    std::vector<double> S;  // interior nodes
    std::vector<double> t;  // sample times
    std::vector<std::vector<std::complex<double>>> psi;
    double h = 0.0;
    double norm_drift = 0.0;         // max ||psi|_h - 1| over the run
    double boundary_mass_max = 0.0;  // max relative boundary amplitude seen
    long steps = 0;
};

// Integrate from t0 to t_end on the continuum clock (H(t) = delta t),
// starting from `initial` sampled on the nodes, sampling psi at out_grid.
// Throws NumericalError (instructing a larger S_max) when the boundary
// amplitude gate trips.
GridSeries grid_evolve(const ModelParams& p, const GridConfig& cfg,
                       const GaussianHermiteState& initial, double t_end,
                       const std::vector<double>& out_grid);

struct GridEigenResult {
    std::vector<double> S;
    double h = 0.0;
    std::vector<double> values;                 // ascending
    std::vector<std::vector<double>> vectors;   // normalized: h sum v^2 = 1
};

// Lowest `count` Dirichlet half-line eigenpairs of the snapshot Hamiltonian
// at field H, from a second-order tridiagonal discretization (Sturm
// bisection + inverse iteration). The half-line boundary keeps only the odd
// oscillator ladder: values approach sqrt(J H) (2k + 3/2).
GridEigenResult grid_eigensolve(const ModelParams& p, double H, const GridConfig& cfg, int count);

// Discrete L2 distance sqrt(h sum |a_i - b_i|^2).
double grid_l2_distance(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b, double h);

// Gaussian tail amplitude e^{-re_omega S_max^2 / 2}: the a-posteriori cutoff
// adequacy metric (compare against 1e-12 when sizing S_max from a known
// width trajectory).
double cutoff_tail(double re_omega, double S_max);

// Grid points per local de Broglie wavelength of a chirped Gaussian of
// complex width omega: the phase gradient at the density edge (zeta standard
// widths out) is |Im omega| zeta / sqrt(Re omega).
double debroglie_points(double h, std::complex<double> omega, double zeta = 4.5);

}  // namespace thinspec
