#include "thinspec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "thinspec/numerics.hpp"

namespace thinspec {

void GridConfig::validate() const {
    if (!(S_max > 0.0)) throw std::domain_error("GridConfig: S_max must be > 0");
    if (n_points < 16) throw std::domain_error("GridConfig: n_points must be >= 16");
    if (!(dt > 0.0)) throw std::domain_error("GridConfig: dt must be > 0");
    if (!(tail_gate > 0.0 && tail_gate < 1.0))
        throw std::domain_error("GridConfig: tail_gate must lie in (0, 1)");
}

namespace {

// One Crank-Nicolson step psi <- (I + i g Hm)^{-1} (I - i g Hm) psi
// = 2 (I + i g Hm)^{-1} psi - psi on the pentadiagonal discretization.
// The matrix is complex symmetric with constant off-diagonals e (first) and
// f (second); only the diagonal varies along the grid. The LDL^T recurrences
// collapse accordingly (w_i = l2_i D_i = f identically):
//     u_i = e - l1_{i-1} f,      D_i = d_i - l1_{i-1} u_{i-1} - l2_{i-2} f,
//     l1_i = u_i / D_i,          l2_i = f / D_i,
// fused with the forward substitution; everything is hand-rolled on raw
// doubles because complex division dominates the runtime otherwise.
struct PentaCn {
    int n = 0;
    std::vector<double> k0diag;  // Laplacian diagonal weights / (12 h^2)
    double off1 = 0.0, off2 = 0.0;  // Laplacian off weights / (12 h^2)
    std::vector<double> V;          // potential (k/2) S_i^2
    // workspaces
    std::vector<double> l1r, l1i, l2r, l2i, Dr_, Di_, xr, xi;

    PentaCn(int n_points, double h, const std::vector<double>& S, double stiffness)
        : n(n_points) {
        const double w = 1.0 / (12.0 * h * h);
        k0diag.resize(n);
        for (int i = 0; i < n; ++i) k0diag[i] = (i == 0 ? 29.0 : 30.0) * w;
        off1 = -16.0 * w;
        off2 = 1.0 * w;
        V.resize(n);
        for (int i = 0; i < n; ++i) V[i] = 0.5 * stiffness * S[i] * S[i];
        l1r.resize(n);
        l1i.resize(n);
        l2r.resize(n);
        l2i.resize(n);
        Dr_.resize(n);
        Di_.resize(n);
        xr.resize(n);
        xi.resize(n);
    }

    // c = hbar^2 / (2 m(t_mid)), g = dt / (2 hbar)
    void step(double* pr, double* pi, double c, double g) {
        const double er = 0.0, ei = g * c * off1;
        const double fr = 0.0, fi = g * c * off2;

        // Fused factor + forward substitution: x holds y = L^{-1} psi,
        // (l1, l2) hold the multipliers, (Dr_, Di_) hold 1/D_i.
        double l1pr = 0.0, l1pi = 0.0;   // l1_{i-1}
        double l2pr = 0.0, l2pi = 0.0;   // l2_{i-1}
        double l2ppr = 0.0, l2ppi = 0.0; // l2_{i-2}
        double upr = 0.0, upi = 0.0;     // u_{i-1}
        double y1r = 0.0, y1i = 0.0;     // y_{i-1}
        double y2r = 0.0, y2i = 0.0;     // y_{i-2}
        for (int i = 0; i < n; ++i) {
            const double dr = 1.0;
            const double di = g * (c * k0diag[i] + V[i]);
            // D = d - l1p*up - l2pp*f
            double Drr = dr, Dii = di;
            if (i >= 1) {
                Drr -= l1pr * upr - l1pi * upi;
                Dii -= l1pr * upi + l1pi * upr;
            }
            if (i >= 2) {
                Drr -= l2ppr * fr - l2ppi * fi;
                Dii -= l2ppr * fi + l2ppi * fr;
            }
            const double den = 1.0 / (Drr * Drr + Dii * Dii);
            const double invr = Drr * den, invi = -Dii * den;
            Dr_[i] = invr;
            Di_[i] = invi;
            // u = e - l1p*f  (only needed while a next row exists)
            double ur = er, ui = ei;
            if (i >= 1) {
                ur -= l1pr * fr - l1pi * fi;
                ui -= l1pr * fi + l1pi * fr;
            }
            // forward substitution y_i = x_i - l1p y1 - l2pp y2
            double yr = pr[i], yi = pi[i];
            if (i >= 1) {
                yr -= l1pr * y1r - l1pi * y1i;
                yi -= l1pr * y1i + l1pi * y1r;
            }
            if (i >= 2) {
                yr -= l2ppr * y2r - l2ppi * y2i;
                yi -= l2ppr * y2i + l2ppi * y2r;
            }
            xr[i] = yr;
            xi[i] = yi;
            // next multipliers l1_i = u/D, l2_i = f/D
            const double nl1r = ur * invr - ui * invi;
            const double nl1i = ur * invi + ui * invr;
            const double nl2r = fr * invr - fi * invi;
            const double nl2i = fr * invi + fi * invr;
            l1r[i] = nl1r;
            l1i[i] = nl1i;
            l2r[i] = nl2r;
            l2i[i] = nl2i;
            l2ppr = l2pr;
            l2ppi = l2pi;
            l2pr = nl2r;
            l2pi = nl2i;
            l1pr = nl1r;
            l1pi = nl1i;
            upr = ur;
            upi = ui;
            y2r = y1r;
            y2i = y1i;
            y1r = yr;
            y1i = yi;
        }
        // Diagonal + backward: x_i = y_i/D_i - l1_i x_{i+1} - l2_i x_{i+2},
        // then psi <- 2 x - psi.
        for (int i = n - 1; i >= 0; --i) {
            double zr = xr[i] * Dr_[i] - xi[i] * Di_[i];
            double zi = xr[i] * Di_[i] + xi[i] * Dr_[i];
            if (i + 1 < n) {
                zr -= l1r[i] * xr[i + 1] - l1i[i] * xi[i + 1];
                zi -= l1r[i] * xi[i + 1] + l1i[i] * xr[i + 1];
            }
            if (i + 2 < n) {
                zr -= l2r[i] * xr[i + 2] - l2i[i] * xi[i + 2];
                zi -= l2r[i] * xi[i + 2] + l2i[i] * xr[i + 2];
            }
            xr[i] = zr;
            xi[i] = zi;
            pr[i] = 2.0 * zr - pr[i];
            pi[i] = 2.0 * zi - pi[i];
        }
    }
};

}  // namespace

GridSeries grid_evolve(const ModelParams& p, const GridConfig& cfg,
                       const GaussianHermiteState& initial, double t_end,
                       const std::vector<double>& out_grid) {
    p.validate();
    cfg.validate();
    initial.validate();
    const double t0 = p.t0();
    if (!(t_end > t0)) throw std::domain_error("grid_evolve: t_end must exceed t0");
    {
        const double slack = 1e-9 * (std::abs(t_end) + std::abs(t_end - t0));
        double prev = t0 - slack;
        for (double t : out_grid) {
            if (!(t >= prev)) throw std::domain_error("grid_evolve: out_grid must be increasing");
            if (t > t_end + slack)
                throw std::domain_error("grid_evolve: out_grid extends past t_end");
            prev = t;
        }
    }

    const int n = cfg.n_points;
    const double h = cfg.h();
    GridSeries out;
    out.h = h;
    out.S.resize(n);
    for (int i = 0; i < n; ++i) out.S[i] = (i + 1) * h;

    std::vector<double> pr(n), pi(n);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> a = state_amplitude(initial, out.S[i]);
        pr[i] = a.real();
        pi[i] = a.imag();
    }

    PentaCn kernel(n, h, out.S, 2.0 * p.J / p.N);

    auto norm_of = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += pr[i] * pr[i] + pi[i] * pi[i];
        return std::sqrt(h * s);
    };
    const double norm0 = norm_of();
    if (!(norm0 > 0.5) || !(norm0 < 2.0))
        throw std::domain_error("grid_evolve: initial state badly normalized on this grid");

    auto boundary_check = [&](double t) {
        double tail = 0.0, peak = 0.0;
        for (int i = 0; i < n; ++i) {
            const double m = pr[i] * pr[i] + pi[i] * pi[i];
            if (m > peak) peak = m;
            if (i >= n - 3 && m > tail) tail = m;
        }
        const double ratio = std::sqrt(tail / peak);
        out.boundary_mass_max = std::max(out.boundary_mass_max, ratio);
        if (ratio > cfg.tail_gate) {
            std::ostringstream os;
            os << "{\"t\": " << t << ", \"boundary_amplitude\": " << ratio
               << ", \"gate\": " << cfg.tail_gate << ", \"S_max\": " << cfg.S_max << "}";
            throw NumericalError(
                "grid_evolve: wavefunction reached the cutoff wall; increase S_max", os.str());
        }
    };

    auto record = [&](double t) {
        boundary_check(t);
        out.t.push_back(t);
        std::vector<std::complex<double>> snap(n);
        for (int i = 0; i < n; ++i) snap[i] = {pr[i], pi[i]};
        out.psi.push_back(std::move(snap));
    };

    const double slack = 1e-9 * (std::abs(t_end) + std::abs(t_end - t0));
    std::size_t gi = 0;
    double t = t0;
    long steps = 0;
    while (gi < out_grid.size() && out_grid[gi] <= t + slack) {
        record(out_grid[gi]);
        ++gi;
    }

    int norm_tick = 0;
    while (t < t_end - slack) {
        double stop = t_end;
        if (gi < out_grid.size()) stop = std::min(stop, out_grid[gi]);
        const double dt_eff = std::min(cfg.dt, stop - t);
        if (dt_eff < 1e-6 * cfg.dt) {
            t = stop;
        } else {
            const double t_mid = t + 0.5 * dt_eff;
            const double H_mid = cfg.frozen_schedule ? p.H0 : p.delta * t_mid;
            const double c = 0.25 * p.N * H_mid;  // hbar^2 / (2 m)
            kernel.step(pr.data(), pi.data(), c, 0.5 * dt_eff / p.hbar);
            t += dt_eff;
            ++steps;
            if (++norm_tick >= 8) {
                norm_tick = 0;
                out.norm_drift = std::max(out.norm_drift, std::abs(norm_of() / norm0 - 1.0));
            }
        }
        while (gi < out_grid.size() && out_grid[gi] <= t + slack) {
            record(out_grid[gi]);
            ++gi;
        }
    }
    out.norm_drift = std::max(out.norm_drift, std::abs(norm_of() / norm0 - 1.0));
    out.steps = steps;
    return out;
}

GridEigenResult grid_eigensolve(const ModelParams& p, double H, const GridConfig& cfg, int count) {
    p.validate();
    cfg.validate();
    if (!(H > 0.0)) throw std::domain_error("grid_eigensolve: H must be > 0");
    const int n = cfg.n_points;
    if (count < 1 || count > std::min(50, n - 1))
        throw std::domain_error("grid_eigensolve: count out of range");

    const double h = cfg.h();
    GridEigenResult out;
    out.h = h;
    out.S.resize(n);
    for (int i = 0; i < n; ++i) out.S[i] = (i + 1) * h;

    const double c = 0.25 * p.N * H;  // hbar^2 / (2 m)
    const double stiffness = 2.0 * p.J / p.N;
    std::vector<double> diag(n), off(n - 1, -c / (h * h));
    for (int i = 0; i < n; ++i)
        diag[i] = 2.0 * c / (h * h) + 0.5 * stiffness * out.S[i] * out.S[i];

    out.values.resize(count);
    out.vectors.resize(count);
    const double rescale = 1.0 / std::sqrt(h);
    for (int k = 0; k < count; ++k) {
        out.values[k] = num::tridiag_eigenvalue(diag, off, k);
        std::vector<double> v = num::tridiag_eigenvector(diag, off, out.values[k]);
        for (double& x : v) x *= rescale;  // unit norm under the h-weighted dot
        out.vectors[k] = std::move(v);
    }
    return out;
}

double grid_l2_distance(const std::vector<std::complex<double>>& a,
                        const std::vector<std::complex<double>>& b, double h) {
    if (a.size() != b.size()) throw std::domain_error("grid_l2_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(h * s);
}

double cutoff_tail(double re_omega, double S_max) {
    return std::exp(-0.5 * re_omega * S_max * S_max);
}

double debroglie_points(double h, std::complex<double> omega, double zeta) {
    const double re = omega.real();
    if (!(re > 0.0)) throw std::domain_error("debroglie_points: Re omega must be > 0");
    const double k_edge = std::abs(omega.imag()) * zeta / std::sqrt(re);
    if (k_edge == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * M_PI / (k_edge * h);
}

}  // namespace thinspec
