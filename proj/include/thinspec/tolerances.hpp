#pragma once

// Central ledger of default numerical tolerances. Every gate used by the
// acceptance harness or the CLI cross-checks is defined (and documented)
// here once, so there are no scattered magic numbers. The A-labels refer to
// the criteria enumerated by the acceptance binary (tests/acceptance.cpp).

namespace thinspec::tol {

// A1: freeze-out law identity across a (J, delta) grid. Pure floating-point
// algebra; a few ulps cover reassociation differences.
inline constexpr double kFreezeOutRel = 1e-14;

// A2: defect saturation vs its small-t0/t_hat asymptote, relative to the
// excited weight 1 - D_sat.
inline constexpr double kDefectAsymRel = 0.05;

// A3: reconstruction fidelity at recursion times (1 - this), and the
// midpoint decoherence ceiling.
inline constexpr double kReconstructionLoss = 1e-6;
inline constexpr double kMidpointFidelityMax = 0.9;

// A4 and CLI check "exact-vs-grid": L2 gate between the Gaussian solution
// and the grid oracle, and the minimum acceptable observed convergence
// order of the oracle under time-step refinement.
inline constexpr double kExactVsGridL2 = 1e-5;
inline constexpr double kGridConvergenceOrder = 1.9;

// A5: comb-time deviation from the asymptotic formulas at t0/t_hat = 1e-3.
inline constexpr double kCombAsymptoticRel = 0.02;

// A6: pointwise agreement of N*omega traces across N, as a multiple of the
// integrator tolerance (10 x kOdeRtol).
inline constexpr double kOdeRtol = 1e-10;
inline constexpr double kUniversalCollapse = 1e-9;

// A7a and CLI check "wigner-eckart-vs-clebsch-gordan".
inline constexpr double kWignerEckartVsCg = 1e-12;

// A7b and CLI check "ed-vs-continuum": ED order-parameter peak times vs the
// continuum return-time predictions.
inline constexpr double kEdPeakTimeRel = 0.05;

// A8: adiabatic-side defect ceiling when delta < 1e-4 sqrt(H0^3 J)/hbar.
inline constexpr double kAdiabaticDsat = 1e-2;

// A9: property-suite gates.
inline constexpr double kHalfLineNorm = 1e-8;   // quadrature normalization
inline constexpr double kNormDrift = 1e-10;     // ED/grid unitarity

// CLI check "kz-vs-exact": the adiabatic-impulse recursion times are an
// asymptotic prediction; at t0 = 2 t_hat the first exact return deviates by
// ~10%, shrinking with k. The reported metric must stay under this ceiling.
inline constexpr double kKzVsExactPeakRel = 0.12;

}  // namespace thinspec::tol
