// Acceptance harness: one self-contained criterion per entry, each printing
// indented evidence lines followed by a single [PASS]/[FAIL] verdict line.
// Exit code is 0 iff every selected criterion passes. Select a single
// criterion with --only <id> (used by the ctest registration).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "thinspec/ed.hpp"
#include "thinspec/exact.hpp"
#include "thinspec/grid.hpp"
#include "thinspec/kz.hpp"
#include "thinspec/model.hpp"
#include "thinspec/numerics.hpp"
#include "thinspec/scenario.hpp"
#include "thinspec/static_spectrum.hpp"

namespace {

using namespace thinspec;
namespace fs = std::filesystem;

std::string sci(double v, int prec = 3) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(prec) << v;
    return os.str();
}

std::string fix(double v, int prec = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

// Prints one evidence line and folds its verdict into the criterion result.
bool clause(std::ostream& out, bool ok, const std::string& text) {
    out << "    " << (ok ? "[ok]   " : "[FAIL] ") << text << "\n";
    return ok;
}

void note(std::ostream& out, const std::string& text) { out << "    note:  " << text << "\n"; }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    g.back() = b;
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------- A1

// t_hat equals (hbar^2/(J delta))^(1/3) to machine precision over (J, delta)
// grids spanning six decades, and satisfies its defining fixed point
// tau(t_hat) = t_hat.
bool crit_a1(std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    double worst_fixed = 0.0;
    double worst_closed = 0.0;
    int tested = 0;
    bool brackets = true;
    for (double hbar : {1.0, 0.25}) {
        for (int ej = -3; ej <= 3; ++ej) {
            for (int ed = -3; ed <= 3; ++ed) {
                ModelParams p;
                p.J = std::pow(10.0, ej);
                p.delta = std::pow(10.0, ed);
                p.hbar = hbar;
                const double t_hat = freeze_out_time(p);
                const double closed = std::cbrt(p.hbar * p.hbar / (p.J * p.delta));
                worst_closed = std::max(worst_closed, std::abs(t_hat - closed) / closed);
                worst_fixed = std::max(worst_fixed,
                                       std::abs(relaxation_time(p, t_hat) - t_hat) / t_hat);
                // Relaxation overtakes the clock exactly once, at t_hat.
                brackets = brackets && relaxation_time(p, 0.9 * t_hat) > 0.9 * t_hat &&
                           relaxation_time(p, 1.1 * t_hat) < 1.1 * t_hat;
                ++tested;
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = true;
    ok &= clause(out, worst_closed <= 4e-16,
                 "closed form (hbar^2/(J delta))^(1/3): max rel dev " + sci(worst_closed) +
                     " over " + std::to_string(tested) + " (J, delta, hbar) points <= 4e-16");
    ok &= clause(out, worst_fixed <= 1e-14,
                 "fixed point tau(t_hat) = t_hat: max rel dev " + sci(worst_fixed) + " <= 1e-14");
    ok &= clause(out, brackets, "tau(t) crosses t from above exactly at t_hat (bracket check)");
    ok &= clause(out, secs < 1.0, "runtime " + fix(secs, 3) + " s < 1 s");
    return ok;
}

// ---------------------------------------------------------------------- A2

// Saturated defect density against its slow-start asymptote
// 1 - 8 (t0/t_hat)^(3/4), normalized by the distance to full defect
// saturation, plus N-independence of the D(t) traces.
bool crit_a2(std::ostream& out) {
    bool ok = true;
    for (double tau0 : {1e-3, 1e-4, 1e-5}) {
        ModelParams p;
        p.H0 = tau0;  // J = delta = hbar = 1 so t_hat = 1 and t0 = tau0
        const double d_sat = defect_saturation(p);
        const double asym = 1.0 - 8.0 * std::pow(tau0, 0.75);
        const double ratio = std::abs(d_sat - asym) / (1.0 - d_sat);
        ok &= clause(out, ratio < 0.05,
                     "t0/t_hat = " + sci(tau0, 0) + ": D_sat = " + fix(d_sat, 9) +
                         ", asymptote = " + fix(asym, 9) + ", normalized deviation = " +
                         fix(ratio, 6) + " (< 0.05 required)");
    }

    // The traces carry no N anywhere; demand bitwise identity.
    ModelParams pa;
    pa.H0 = 1e-4;
    ModelParams pb = pa;
    pa.N = 100;
    pb.N = 1000;
    const auto ta = defect_trace(pa, 3.0, 400);
    const auto tb = defect_trace(pb, 3.0, 400);
    double dmax = 0.0;
    for (std::size_t i = 0; i < ta.D.size(); ++i)
        dmax = std::max(dmax, std::abs(ta.D.v[i] - tb.D.v[i]));
    ok &= clause(out, dmax == 0.0,
                 "D(t) traces for N = 100 and N = 1000 bitwise identical (max abs diff " +
                     sci(dmax) + ")");

    if (!ok) {
        note(out, "analysis: with rho = sqrt(t0/t_hat), D_sat = 1 - 8 rho^(3/2)/(1+rho)^3, so");
        note(out, "the normalized deviation equals (1+rho)^3 - 1 = 3 rho + 3 rho^2 + rho^3");
        note(out, "identically. It is a property of the closed form, not of any numerics:");
        for (double tau0 : {1e-3, 1e-4, 1e-5}) {
            const double rho = std::sqrt(tau0);
            note(out, "  t0/t_hat = " + sci(tau0, 0) + ": (1+rho)^3 - 1 = " +
                          fix(std::pow(1.0 + rho, 3) - 1.0, 6));
        }
        note(out, "The 0.05 ceiling therefore requires t0/t_hat < ~2.76e-4; at 1e-3 the gap is");
        note(out, "0.098 for every correct implementation. The asymptote keeps only the leading");
        note(out, "order in rho; the two agree in the stated sense from ~2.8e-4 downward, as the");
        note(out, "1e-4 and 1e-5 rows show. Reporting the 1e-3 row red rather than loosening the");
        note(out, "comparison: the formula itself is exercised bitwise in the N-independence row.");
    }
    return ok;
}

// ---------------------------------------------------------------------- A3

// Slow start (t0 = 2 t_hat): the phased snapshot superposition revives at
// every recursion time and dephases midway between them.
bool crit_a3(std::ostream& out) {
    ModelParams p;
    p.H0 = 2.0;  // J = delta = hbar = 1: t_hat = 1, t0 = 2
    const double t_hat = freeze_out_time(p);
    const double t0 = p.t0();
    bool ok = clause(out, classify_regime(t0, t0, t_hat) == RegimeLabel::Adiabatic,
                     "t0 = 2 t_hat starts in the adiabatic regime");

    const auto tks = recursion_times(t_hat, 5);
    note(out, "t_0 = t_hat = " + fix(tks[0], 6) + " precedes the schedule start t0 = " +
                  fix(t0, 6) + "; revivals are tested from k = 1");
    double lit_plateau = 0.0;
    for (int k = 1; k <= 5; ++k) {
        const auto st = kz_state_at(p, tks[k]);
        const double f = kz_reconstruction_fidelity(p, st);
        ok &= clause(out, f > 1.0 - 1e-6,
                     "k = " + std::to_string(k) + ": t_k = " + fix(tks[k], 6) +
                         ", revival fidelity 1 - " + sci(1.0 - f) + " (> 1 - 1e-6 required)");
        lit_plateau = kz_fidelity(st, static_omega(p, renormalized_field(p, field_at(p, tks[k]))));
    }
    note(out, "against the 2^(1/3)-shifted width convention for the revived ground state the");
    note(out, "plateau value is " + fix(lit_plateau, 9) +
                  " = const; the reconstruction field H t0/t_hat is the");
    note(out, "self-consistent convention for which the revival is exact (see README)");

    for (int k = 1; k <= 4; ++k) {
        const double tm = 0.5 * (tks[k] + tks[k + 1]);
        const double fm = kz_reconstruction_fidelity(p, kz_state_at(p, tm));
        const double ta = t_hat * std::pow(1.0 + 1.5 * M_PI * (k + 0.5), 2.0 / 3.0);
        const double fa = kz_reconstruction_fidelity(p, kz_state_at(p, ta));
        ok &= clause(out, fm < 0.9,
                     "midway t = " + fix(tm, 4) + " (between k = " + std::to_string(k) + ", " +
                         std::to_string(k + 1) + "): fidelity " + fix(fm, 6) +
                         " < 0.9; phase antinode t = " + fix(ta, 4) + ": " + fix(fa, 6));
    }
    return ok;
}

// ---------------------------------------------------------------------- A4

// Linear-flow reconstruction against the Crank-Nicolson grid oracle over
// [t0, 10 t_hat] at t0/t_hat = 1e-2, N = 100, plus observed convergence
// order under time-step refinement.
bool crit_a4(std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    ModelParams p;
    p.H0 = 1e-2;
    const double t0 = p.t0();
    const double t_end = 10.0;
    bool ok = true;

    // Width trajectory first: it fixes the box size the oracle needs.
    const std::vector<double> sample_t = {0.30, 0.80, 1.50, 2.40, 3.30, 4.20,
                                          5.00, 6.10, 7.00, 8.10, 9.10, 10.0};
    const auto exact = evolve_exact(p, t_end, sample_t);
    const double s_max = std::ceil(std::sqrt(60.0 / exact.min_re_omega));
    note(out, "min Re omega over the run = " + sci(exact.min_re_omega) +
                  " -> S_max = " + fix(s_max, 0) + ", Gaussian wall tail " +
                  sci(cutoff_tail(exact.min_re_omega, s_max)));

    GridConfig cfg;
    cfg.S_max = s_max;
    cfg.n_points = static_cast<int>(std::llround(s_max / 0.075)) - 1;
    cfg.dt = (t_end - t0) / 800000.0;
    const auto init = static_ground_state(p, p.H0).state;
    const auto grid = grid_evolve(p, cfg, init, t_end, sample_t);

    double worst = 0.0;
    double worst_t = t0;
    for (std::size_t i = 0; i < sample_t.size(); ++i) {
        std::vector<std::complex<double>> ex(grid.S.size());
        for (std::size_t j = 0; j < grid.S.size(); ++j)
            ex[j] = wavefunction_at(exact.samples[i], 1, grid.S[j]);
        const double d = grid_l2_distance(grid.psi[i], ex, grid.h);
        if (d > worst) {
            worst = d;
            worst_t = sample_t[i];
        }
    }
    ok &= clause(out, worst < 1e-5,
                 "L2(reconstruction, grid oracle) over 12 sample times in [t0, 10 t_hat]: worst " +
                     sci(worst) + " at t = " + fix(worst_t, 2) + " (< 1e-5 required; h = " +
                     fix(grid.h, 4) + ", dt = " + sci(cfg.dt, 2) + ")");
    note(out, "oracle norm drift " + sci(grid.norm_drift) + ", relative boundary amplitude " +
                  sci(grid.boundary_mass_max));

    // Refinement ladder on [t0, 2]: the whole discretization is refined with
    // dt halved and h tied as h ~ sqrt(dt), so the O(dt^2) stepping error and
    // the O(h^4) Laplacian error both fall by 4x per level and the distance
    // to the reconstruction converges at order 2 in dt.
    const double t_lad = 2.0;
    const std::vector<double> lad_t = {1.2, t_lad};
    const auto exact_lad = evolve_exact(p, t_lad, lad_t);
    const double s2 = std::ceil(std::sqrt(60.0 / exact_lad.min_re_omega));
    GridConfig c2;
    c2.S_max = s2;
    std::vector<double> errs;
    const double h_levels[] = {0.14, 0.14 / std::sqrt(2.0), 0.07};
    const long nt_levels[] = {25000, 50000, 100000};
    for (int lvl = 0; lvl < 3; ++lvl) {
        c2.n_points = static_cast<int>(std::llround(s2 / h_levels[lvl])) - 1;
        c2.dt = (t_lad - t0) / static_cast<double>(nt_levels[lvl]);
        const auto g = grid_evolve(p, c2, init, t_lad, lad_t);
        std::vector<std::complex<double>> ex(g.S.size());
        for (std::size_t j = 0; j < g.S.size(); ++j)
            ex[j] = wavefunction_at(exact_lad.samples[1], 1, g.S[j]);
        errs.push_back(grid_l2_distance(g.psi[1], ex, g.h));
    }
    const double o1 = std::log2(errs[0] / errs[1]);
    const double o2 = std::log2(errs[1] / errs[2]);
    ok &= clause(out, errs[0] > errs[1] && errs[1] > errs[2],
                 "distance decreases under refinement: " + sci(errs[0]) + " -> " + sci(errs[1]) +
                     " -> " + sci(errs[2]) + " (dt halved, h ~ sqrt(dt), on [t0, 2])");
    ok &= clause(out, std::min(o1, o2) >= 1.9,
                 "observed convergence order " + fix(o1, 3) + ", " + fix(o2, 3) +
                     " (>= 1.9 required)");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok &= clause(out, secs < 120.0, "runtime " + fix(secs, 1) + " s < 120 s");
    return ok;
}

// ---------------------------------------------------------------------- A5

// Late-time comb asymptotics of the driven width trajectory for
// t0/t_hat in {1e-1, 1e-2, 1e-3}.
bool crit_a5(std::ostream& out) {
    const std::vector<double> tau0s = {1e-1, 1e-2, 1e-3};
    std::vector<double> mean_return_dev;
    std::vector<double> mean_narrow_dev;
    std::vector<CombReport> reports;
    for (double tau0 : tau0s) {
        ModelParams p;
        p.H0 = tau0;
        const auto series = evolve_exact(p, 9.0, linspace(p.t0(), 9.0, 2000));
        reports.push_back(detect_comb(p, series, 5));
        const auto& rep = reports.back();
        double mr = 0.0;
        for (int k = 1; k <= 3; ++k) mr += rep.deviation_return.at(k) / 3.0;
        double mn = 0.0;
        for (int k = 2; k <= 4; ++k) mn += rep.deviation_narrow.at(k) / 3.0;
        mean_return_dev.push_back(mr);
        mean_narrow_dev.push_back(mn);
    }

    bool ok = true;
    // Clause 1: detected Re omega peak instants (the narrow-state comb)
    // against t_hat (3 k pi/2 + 13 pi/8)^(2/3) at t0/t_hat = 1e-3.
    const auto& rep3 = reports.back();
    for (int k = 2; k <= 4; ++k) {
        const double dev = rep3.deviation_narrow.at(k);
        ok &= clause(out, dev < 0.02,
                     "t0/t_hat = 1e-3, Re omega peak k = " + std::to_string(k) + ": detected t = " +
                         fix(rep3.detected_narrow.at(k), 6) + " vs (3k pi/2 + 13 pi/8)^(2/3) = " +
                         fix(rep3.predicted_narrow.at(k), 6) + ", rel dev " + fix(dev, 6) +
                         " (< 0.02 required)");
    }

    // Clause 2, literal pairing: renormalized-fidelity peak instants against
    // t_hat (3 k pi/2 + 7 pi/8)^(2/3).
    bool lit_ok = true;
    for (int k = 2; k <= 4; ++k) {
        const double tp = rep3.renormalized_peak_times.at(k);
        const double pred = rep3.predicted_return.at(k);
        const double dev = std::abs(tp - pred) / pred;
        lit_ok &= clause(out, dev < 0.02,
                         "t0/t_hat = 1e-3, renormalized-fidelity peak k = " + std::to_string(k) +
                             ": t = " + fix(tp, 6) + " vs (3k pi/2 + 7 pi/8)^(2/3) = " +
                             fix(pred, 6) + ", rel dev " + fix(dev, 6) + " (< 0.02 required)");
    }
    ok &= lit_ok;
    // The observable that does track the 7 pi/8 comb: the detected
    // classical-return instants (equivalently the order-parameter revivals).
    for (int k = 2; k <= 4; ++k) {
        const double dev = rep3.deviation_return.at(k);
        ok &= clause(out, dev < 0.02,
                     "t0/t_hat = 1e-3, classical-return instant k = " + std::to_string(k) +
                         ": detected t = " + fix(rep3.detected_return.at(k), 6) +
                         " vs same comb, rel dev " + fix(dev, 6) + " (< 0.02)");
    }

    // Clause 3: deviations shrink monotonically along the tau0 ladder.
    const bool mono = mean_return_dev[0] > mean_return_dev[1] &&
                      mean_return_dev[1] > mean_return_dev[2];
    ok &= clause(out, mono,
                 "mean classical-return comb deviation (k = 1..3) shrinks monotonically: " +
                     fix(mean_return_dev[0], 6) + " -> " + fix(mean_return_dev[1], 6) + " -> " +
                     fix(mean_return_dev[2], 6) + " along t0/t_hat = 1e-1, 1e-2, 1e-3");
    note(out, "mean Re-omega-peak comb deviation (k = 2..4) along the same ladder: " +
                  fix(mean_narrow_dev[0], 6) + " -> " + fix(mean_narrow_dev[1], 6) + " -> " +
                  fix(mean_narrow_dev[2], 6) + " (converges to the next-order comb offset, not 0)");

    if (!lit_ok) {
        note(out, "analysis: the renormalized-width fidelity peaks where the evolved state is");
        note(out, "narrowest, i.e. on the Re omega peak comb (3k pi/2 + 13 pi/8)^(2/3) tested in");
        note(out, "rows 1-3; its peak values there are " + fix(rep3.renormalized_peak_values.at(2), 4) +
                      ", " + fix(rep3.renormalized_peak_values.at(3), 4) + ", " +
                      fix(rep3.renormalized_peak_values.at(4), 4) + " (k = 2..4).");
        note(out, "At the 7 pi/8 comb the state is instead at its widest (the classical-return");
        note(out, "envelope; renormalized fidelity there ~ 0.01), and that comb is traced to");
        note(out, "0.04% by the classical-return instants printed above. The fixed offset between");
        note(out, "the two comb phases at k = 2 is ((13 pi/8 + 3 pi)/(7 pi/8 + 3 pi))^(2/3) - 1 =");
        note(out, fix(std::pow((13.0 * M_PI / 8.0 + 3.0 * M_PI) / (7.0 * M_PI / 8.0 + 3.0 * M_PI),
                               2.0 / 3.0) - 1.0, 6) +
                      ", exactly the deviation measured in the failing rows: pairing the");
        note(out, "renormalized-fidelity peaks with the 7 pi/8 comb cannot be satisfied by a");
        note(out, "correct evolution. Both combs individually pass at 2% against their own");
        note(out, "observables; the red rows record the pairing as stated.");
    }
    return ok;
}

// ---------------------------------------------------------------------- A6

// N omega(t) collapses onto a single universal trace for N spanning two
// decades at fixed (J, delta, t0).
bool crit_a6(std::ostream& out) {
    ModelParams base;
    base.H0 = 1e-2;
    const auto grid = linspace(base.t0(), 9.0, 120);
    ExactOptions opt;  // rtol 1e-10
    std::vector<std::vector<std::complex<double>>> traces;
    for (int n : {100, 1000, 10000}) {
        ModelParams p = base;
        p.N = n;
        const auto s = evolve_exact(p, 9.0, grid, opt);
        std::vector<std::complex<double>> scaled(s.samples.size());
        for (std::size_t i = 0; i < s.samples.size(); ++i)
            scaled[i] = static_cast<double>(n) * s.samples[i].omega;
        traces.push_back(std::move(scaled));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < traces[0].size(); ++i) {
        for (std::size_t v = 1; v < traces.size(); ++v)
            worst = std::max(worst, std::abs(traces[v][i] - traces[0][i]) /
                                        (1.0 + std::abs(traces[0][i])));
    }
    return clause(out, worst <= 1e-9,
                  "max pointwise deviation of N omega(t) across N = 1e2, 1e3, 1e4 over 120 "
                  "times: " + sci(worst) + " <= 1e-9 (10x integrator tolerance 1e-10)");
}

// ---------------------------------------------------------------------- A7

// Exact diagonalization as ground truth: closed-form matrix elements,
// order-parameter revival instants, and the finite-N approach to the
// continuum order parameter.
bool crit_a7(std::ostream& out) {
    bool ok = true;
    // (a) closed-form tridiagonal elements vs the product-basis construction.
    for (int n : {4, 8}) {
        const auto ops = build_basis_and_operators(n);
        double worst = 0.0;
        for (int s = 0; s + 1 < ops.dim(); ++s)
            worst = std::max(worst,
                             std::abs(ops.coupling[s] - staggered_element_bruteforce(n, s)));
        ok &= clause(out, worst <= 1e-12,
                     "(a) N = " + std::to_string(n) +
                         ": max |closed form - product basis| = " + sci(worst) + " <= 1e-12");
    }

    // (b) N = 400 driven run, t0/t_hat = 1e-2: order-parameter revival
    // instants against the classical-return comb, k <= 2.
    ModelParams p;
    p.N = 400;
    p.delta = 1.0 / 343.0;  // t_hat = 7
    p.H0 = 0.07 / 343.0;    // t0 = 0.07 = 1e-2 t_hat
    const double t_hat = freeze_out_time(p);
    const double t0 = p.t0();
    const auto preds = predicted_return_times(p, 2);
    const double t_end_ed = 5.45 * t_hat - t0;  // covers k = 2 with margin
    const auto grid = linspace(0.0, t_end_ed, 600);
    EdOptions eopt;
    eopt.dt = 5e-4;
    const auto es = ed_evolve(p, t_end_ed, grid, eopt);
    const auto ops = build_basis_and_operators(p.N);
    std::vector<double> op(es.t.size());
    for (std::size_t i = 0; i < es.t.size(); ++i)
        op[i] = ed_observables(ops, p.J, p.H0 + p.delta * es.t[i], es.psi[i]).order_parameter;
    note(out, "(b) dt = " + sci(es.dt_used, 2) + ", " + std::to_string(es.steps) +
                  " steps, norm drift " + sci(es.norm_drift) + ", state-error estimate " +
                  sci(es.error_estimate));

    // Revival instants: interior local maxima of the trace past the
    // freeze-out time, refined parabolically. The inter-revival dips are
    // shallow here (the trace stays within ~8% of its maximum because
    // omega_S(H(t)) ~ 0.02 keeps the ground-state doublet nearly aligned
    // with the evolved state), so a prominence gate of 2% of the maximum
    // merges ripples instead of thresholding at half maximum.
    const double op_max = *std::max_element(op.begin(), op.end());
    const double drop = 0.02 * op_max;
    std::vector<std::size_t> kept;
    for (std::size_t i = 1; i + 1 < op.size(); ++i) {
        if (es.t[i] + t0 <= t_hat) continue;
        if (!(op[i] > op[i - 1] && op[i] >= op[i + 1])) continue;
        if (!kept.empty()) {
            double valley = op[i];
            for (std::size_t j = kept.back(); j <= i; ++j) valley = std::min(valley, op[j]);
            if (valley > std::min(op[kept.back()], op[i]) - drop) {
                if (op[i] > op[kept.back()]) kept.back() = i;  // same revival, higher sample
                continue;
            }
        }
        kept.push_back(i);
    }
    std::vector<double> peaks;
    std::ostringstream shape;
    for (std::size_t best : kept) {
        const double denom = op[best - 1] - 2.0 * op[best] + op[best + 1];
        const double shift = denom < 0.0 ? 0.5 * (op[best - 1] - op[best + 1]) / denom : 0.0;
        peaks.push_back(es.t[best] + shift * (grid[1] - grid[0]) + t0);
        if (peaks.size() > 1) {
            double valley = op[best];
            for (std::size_t j = kept[peaks.size() - 2]; j <= best; ++j)
                valley = std::min(valley, op[j]);
            shape << " | valley " << fix(valley, 1);
        }
        shape << " | peak " << fix(op[best], 1);
    }
    note(out, "(b) trace shape:" + shape.str());
    ok &= clause(out, peaks.size() >= 3, "(b) found " + std::to_string(peaks.size()) +
                                             " order-parameter revivals (>= 3 required)");
    for (int k = 0; k < 3 && k < static_cast<int>(peaks.size()); ++k) {
        const double dev = std::abs(peaks[k] - preds[k]) / preds[k];
        ok &= clause(out, dev < 0.05,
                     "(b) revival k = " + std::to_string(k) + ": t = " + fix(peaks[k], 4) +
                         " vs t_hat (3k pi/2 + 7 pi/8)^(2/3) = " + fix(preds[k], 4) +
                         ", rel dev " + fix(dev, 4) + " (< 0.05 required)");
    }

    // (c) static order parameter vs the continuum form at fixed N^2 H / J.
    double prev = 1.0;
    bool mono = true;
    std::ostringstream row;
    for (int n : {50, 100, 200, 400}) {
        const auto o = build_basis_and_operators(n);
        const double h = 16.0 / (static_cast<double>(n) * n);
        const auto gs = ed_ground_state(o, 1.0, h);
        ModelParams pc;
        pc.N = n;
        const double rel = std::abs(gs.order_parameter - static_order_parameter(pc, h)) /
                           static_order_parameter(pc, h);
        mono = mono && rel < prev;
        prev = rel;
        row << (n == 50 ? "" : " -> ") << fix(rel, 6);
    }
    ok &= clause(out, mono,
                 "(c) relative deviation from N e^(-omega_S) decreases monotonically over N = "
                 "50, 100, 200, 400 at N^2 H = 16 J: " + row.str());
    return ok;
}

// ---------------------------------------------------------------------- A8

// The adiabatic limit under a vanishing start field never arrives, while
// driving below the adiabaticity bound at fixed H0 keeps defects out.
bool crit_a8(std::ostream& out) {
    bool ok = true;
    // delta fixed: D_sat climbs monotonically to 1 as H0 -> 0.
    double prev = -1.0;
    bool mono = true;
    double last = 0.0;
    std::ostringstream row;
    for (int e = 2; e <= 8; ++e) {
        ModelParams p;
        p.H0 = std::pow(10.0, -e);  // J = delta = 1: t_hat = 1
        last = defect_saturation(p);
        mono = mono && last > prev;
        prev = last;
        if (e == 2 || e == 5 || e == 8) row << (e == 2 ? "" : ", ") << "1e-" << e << ": " << fix(last, 7);
    }
    ok &= clause(out, mono && last > 1.0 - 1e-5,
                 "delta fixed: D_sat rises monotonically toward 1 over H0 = 1e-2..1e-8 (" +
                     row.str() + ")");

    // H0 fixed: any delta below 1e-4 sqrt(H0^3 J)/hbar starts adiabatically.
    ModelParams q;
    q.H0 = 1.0;
    const double bound = adiabaticity_bound(q);
    bool adia = true;
    std::ostringstream row2;
    for (double d : {0.99e-4, 1e-5, 1e-6}) {
        ModelParams r = q;
        r.delta = d * bound;
        const double ds = defect_saturation(r);
        adia = adia && ds < 1e-2;
        row2 << (d == 0.99e-4 ? "" : ", ") << sci(d, 2) << " delta*: D_sat = " << fix(ds, 7)
             << " (t0/t_hat = " << fix(r.t0() / freeze_out_time(r), 1) << ")";
    }
    ok &= clause(out, adia, "H0 fixed, delta* = sqrt(H0^3 J)/hbar = " + fix(bound, 6) +
                                ": D_sat < 1e-2 at delta = " + row2.str());

    // The limits do not commute: even far below the delta* of H0 = 1, a
    // shrinking H0 restores full defect saturation.
    ModelParams s;
    s.delta = 1e-6;
    s.H0 = 1e-2;
    const double d_hi = defect_saturation(s);
    s.H0 = 1e-8;
    const double d_lo = defect_saturation(s);
    ok &= clause(out, d_lo > 0.99,
                 "non-commuting limits at delta = 1e-6: D_sat(H0 = 1e-2) = " + fix(d_hi, 6) +
                     " but D_sat(H0 = 1e-8) = " + fix(d_lo, 6) +
                     " -> slow driving only postpones saturation");
    return ok;
}

// ---------------------------------------------------------------------- A9

// Property suite: normalization, width positivity, unitarity, byte-level
// determinism, worker-count invariance.
bool crit_a9(std::ostream& out) {
    bool ok = true;

    // Half-line normalization of evolved states, including the strongly
    // chirped instants adjacent to the width-comb events.
    ModelParams p;
    p.H0 = 1e-2;
    const std::vector<double> times = {0.30, 1.20, 1.993, 2.50, 2.953, 3.50, 4.58, 6.00};
    const auto series = evolve_exact(p, 6.0, times);
    double worst_norm = 0.0;
    for (const auto& s : series.samples) {
        const double cutoff = quadrature_cutoff(s.omega.real());
        const std::function<double(double)> density = [&](double x) {
            return std::norm(wavefunction_at(s, 1, x));
        };
        const double nrm = num::integrate(density, 0.0, cutoff, 1e-12);
        worst_norm = std::max(worst_norm, std::abs(nrm - 1.0));
    }
    ok &= clause(out, worst_norm <= 1e-8,
                 "half-line norm of 8 evolved states (quadrature): max |norm - 1| = " +
                     sci(worst_norm) + " <= 1e-8");

    // Width positivity certificates over full driven runs.
    ModelParams p3;
    p3.H0 = 1e-3;
    const auto deep = evolve_exact(p3, 9.0, {9.0});
    ok &= clause(out, series.min_re_omega > 0.0 && deep.min_re_omega > 0.0,
                 "Re omega > 0 on every accepted step: min " + sci(series.min_re_omega) +
                     " (t0/t_hat = 1e-2), " + sci(deep.min_re_omega) + " (1e-3)");

    // Unitarity of both brute-force evolutions.
    ModelParams pe;
    pe.N = 60;
    pe.delta = 0.02;
    pe.H0 = 0.002;
    const auto ed = ed_evolve(pe, 1.2, linspace(0.0, 1.2, 20));
    ok &= clause(out, ed.norm_drift < 1e-10,
                 "spin-tower evolution norm drift " + sci(ed.norm_drift) + " < 1e-10");
    GridConfig cfg;
    cfg.S_max = 40.0;
    cfg.n_points = 399;
    cfg.dt = 1e-3;
    const auto g = grid_evolve(p, cfg, static_ground_state(p, p.H0).state, 0.4, {0.2, 0.4});
    ok &= clause(out, g.norm_drift < 1e-10,
                 "grid evolution norm drift " + sci(g.norm_drift) + " < 1e-10");

    // Byte-identical reruns of a full scenario.
    fs::remove_all("acceptance_out");
    Scenario sc;
    sc.kind = "kz";
    sc.params = ModelParams{1.0, 1.0, 1e-2, 100, 1.0};
    sc.t_end_over_that = 4.0;
    sc.samples = 50;
    sc.k_max = 2;
    const auto o1 = run_scenario(sc, "acceptance_out/det1");
    const auto o2 = run_scenario(sc, "acceptance_out/det2");
    bool same = o1.files_written.size() == o2.files_written.size();
    for (std::size_t i = 0; same && i < o1.files_written.size(); ++i)
        same = slurp(o1.files_written[i]) == slurp(o2.files_written[i]);
    ok &= clause(out, same, "identical scenario reruns produce byte-identical outputs (" +
                                std::to_string(o1.files_written.size()) + " files)");

    // Worker-count invariance of sweep aggregation.
    Scenario sw;
    sw.kind = "sweep";
    sw.sweep_axis = "t0_over_that";
    sw.sweep_kind = "kz";
    sw.axis_values = {0.01, 0.1, 0.5, 2.0};
    sw.samples = 60;
    sw.workers = 1;
    const auto w1 = run_scenario(sw, "acceptance_out/sweep_w1");
    sw.workers = 4;
    const auto w4 = run_scenario(sw, "acceptance_out/sweep_w4");
    bool swsame = w1.files_written.size() == w4.files_written.size();
    for (std::size_t i = 0; swsame && i < w1.files_written.size(); ++i)
        swsame = slurp(w1.files_written[i]) == slurp(w4.files_written[i]);
    ok &= clause(out, swsame, "sweep outputs identical for 1 and 4 workers (" +
                                  std::to_string(w1.files_written.size()) + " files)");
    fs::remove_all("acceptance_out");
    return ok;
}

// ----------------------------------------------------------------------

struct Criterion {
    const char* id;
    const char* title;
    bool (*fn)(std::ostream&);
};

const Criterion kTable[] = {
    {"A1", "freeze-out time from the relaxation fixed point", crit_a1},
    {"A2", "defect saturation against the slow-start asymptote", crit_a2},
    {"A3", "revivals and dephasing of the phased snapshot superposition", crit_a3},
    {"A4", "Gaussian reconstruction against the grid oracle", crit_a4},
    {"A5", "late-time width-comb asymptotics", crit_a5},
    {"A6", "universal N omega(t) collapse", crit_a6},
    {"A7", "exact diagonalization ground truth", crit_a7},
    {"A8", "non-commuting slow-drive and weak-field limits", crit_a8},
    {"A9", "normalization, positivity, unitarity, determinism", crit_a9},
};

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else if (a == "--help" || a == "-h") {
            std::cout << "usage: acceptance [--only <A1..A9>]\n";
            return 0;
        } else {
            std::cerr << "unknown argument: " << a << "\n";
            return 2;
        }
    }

    bool matched = false;
    bool all_ok = true;
    for (const auto& c : kTable) {
        if (!only.empty() && only != c.id) continue;
        matched = true;
        std::cout << "--- " << c.id << ": " << c.title << "\n";
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.fn(std::cout);
        } catch (const std::exception& e) {
            std::cout << "    unexpected exception: " << e.what() << "\n";
            ok = false;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.title << " ("
                  << fix(secs, 2) << " s)\n";
        all_ok = all_ok && ok;
    }
    if (!matched) {
        std::cerr << "no criterion named '" << only << "'\n";
        return 2;
    }
    return all_ok ? 0 : 1;
}
