#pragma once

// Exact diagonalization in the M = 0, maximal-sublattice-spin sector: the
// total-spin basis |S, M=0> with S_A = S_B = N/4 and S = 0..N/2 (dimension
// N/2 + 1). The full Hamiltonian is real symmetric tridiagonal there:
// diagonal E(S) = (J/N)[S(S+1) - 2 s(s+1)], off-diagonal -H <S+1,0|O|S,0>
// with O = S_A^z - S_B^z. This module is an independent ground truth for the
// continuum results: it never uses the Gaussian ansatz.

#include <complex>
#include <vector>

#include "thinspec/model.hpp"
#include "thinspec/series.hpp"

namespace thinspec {

// N-dependent, parameter-free matrix data. Energies are stored in units of J.
struct EdOperators {
    int N = 0;
    std::vector<double> energy_over_J;  // E(S)/J, S = 0..N/2
    std::vector<double> coupling;       // <S+1,0|O|S,0>, S = 0..N/2-1

    int dim() const { return static_cast<int>(energy_over_J.size()); }
};

// Closed-form (Wigner-Eckart) tridiagonal elements. N must be even, >= 4,
// and at most 20000 (desk-scale cap).
EdOperators build_basis_and_operators(int N);

// The same matrix element <S+1,0|S_A^z - S_B^z|S,0> from an explicit
// product-basis construction: diagonalize S^2 over all |m_A, m_B = -m_A>
// and read the element off the m-basis eigenvectors (O is diagonal there).
// Deterministic sign convention: the largest-m_A component of each
// eigenvector is taken positive. O(N^3); intended for small N.
double staggered_element_bruteforce(int N, int S);

struct EdGroundState {
    double energy = 0.0;
    std::vector<double> psi;        // real ground-state amplitudes over S
    double order_parameter = 0.0;   // 2 <O>
};

// Lowest eigenpair of diag(E(S)) - H O. H = 0 returns the pure S = 0
// singlet exactly. H must be >= 0.
EdGroundState ed_ground_state(const EdOperators& ops, double J, double H);

struct EdObservables {
    double order_parameter = 0.0;  // 2 <O>
    double defect_density = 0.0;   // 1 - |<gs(H)|psi>|^2
    double energy = 0.0;           // <H_LM(t)>
};

// Observables of a normalized state at field H.
EdObservables ed_observables(const EdOperators& ops, double J, double H,
                             const std::vector<std::complex<double>>& psi);

struct EdOptions {
    double dt = 0.0;              // 0: auto, min(1e-3 hbar/J, span/1000)
    double error_budget = 1e-6;   // L2 state-error bound; <= 0 disables control
    int monitor_stride = 512;     // steps between early-abort probes (<= 0: none)
    int max_halvings = 4;         // whole-run dt-halving retries
};

// Evolution samples at the requested output times (evolution clock: H(t) =
// H0 + delta t starting from t = 0, which equals the continuum schedule at
// t_continuum = t + t0).
struct EdSeries {
    std::vector<double> t;
    std::vector<std::vector<std::complex<double>>> psi;
    double norm_drift = 0.0;       // max |norm - 1| over the run
    double dt_used = 0.0;
    long steps = 0;
    double error_estimate = 0.0;   // Richardson bound accepted against the budget
};

// Norm-preserving implicit-midpoint (Cayley) evolution from the ground state
// at H0 under H(t) = H0 + delta t. delta = 0 is the stationarity control.
//
// Accuracy control: a candidate step size is accepted only when a full rerun
// at half the step reproduces every sampled state (and the final one) to
// within the budget, Richardson-weighted; the half-step run is then returned,
// so its own error is asymptotically a quarter of the accepted bound. Sparse
// in-run probes abort a candidate early when even a single-step projection
// already exceeds the budget. Each rejection halves dt; throws NumericalError
// (with diagnostics) once max_halvings is exhausted.
EdSeries ed_evolve(const ModelParams& p, double t_end, const std::vector<double>& out_grid,
                   const EdOptions& opts = {});

}  // namespace thinspec
