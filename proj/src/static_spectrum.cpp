#include "thinspec/static_spectrum.hpp"

#include <cmath>

#include "thinspec/numerics.hpp"

namespace thinspec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void GaussianHermiteState::validate() const {
    if (n < 1 || n % 2 == 0)
        throw std::domain_error("GaussianHermiteState: order n must be odd and >= 1");
    if (!(omega.real() > 0.0))
        throw std::domain_error("GaussianHermiteState: Re(omega) must be > 0");
}

GaussianHermiteState snapshot_eigenstate(const ModelParams& p, double H, int n) {
    if (n % 2 == 0)
        throw std::domain_error("snapshot_eigenstate: even n violates the S >= 0 boundary condition");
    if (n < 1) throw std::domain_error("snapshot_eigenstate: n must be >= 1");
    GaussianHermiteState s;
    s.n = n;
    s.omega = {static_omega(p, H), 0.0};
    s.phi = 0.0;
    return s;
}

StaticGroundState static_ground_state(const ModelParams& p, double H) {
    return {snapshot_eigenstate(p, H, 1), H};
}

double dual_thin_energy(const ModelParams& p, double H, int n) {
    if (!(H > 0.0)) throw std::domain_error("dual_thin_energy: H must be > 0");
    if (n < 1 || n % 2 == 0)
        throw std::domain_error("dual_thin_energy: n must be odd and >= 1");
    return std::sqrt(p.J * H) * (n + 0.5);
}

double static_order_parameter(const ModelParams& p, double H) {
    return p.N * std::exp(-static_omega(p, H));
}

double overlap_n1(std::complex<double> bra_omega, std::complex<double> ket_omega) {
    if (!(bra_omega.real() > 0.0) || !(ket_omega.real() > 0.0))
        throw std::domain_error("overlap_n1: widths must have positive real part");
    const double a = bra_omega.real();
    const double b = ket_omega.real();
    const double denom = std::abs(std::conj(bra_omega) + ket_omega);
    return 8.0 * std::pow(a * b, 1.5) / (denom * denom * denom);
}

std::complex<double> state_amplitude(const GaussianHermiteState& s, double S) {
    s.validate();
    if (S < 0.0) throw std::domain_error("state_amplitude: S must be >= 0");
    const double a = s.omega.real();
    const double x = std::sqrt(a) * S;
    const double radial = std::sqrt(2.0) * std::pow(a / kPi, 0.25) * num::hermite_function(s.n, x);
    const double phase = -0.5 * S * S * s.omega.imag() - (s.n + 0.5) * s.phi;
    return radial * std::complex<double>(std::cos(phase), std::sin(phase));
}

double quadrature_cutoff(double min_re_omega) {
    if (!(min_re_omega > 0.0))
        throw std::domain_error("quadrature_cutoff: width must be positive");
    return 12.0 / std::sqrt(min_re_omega);
}

double SnapshotExpansion::weight() const {
    double w = 0.0;
    for (const auto& cn : c) w += std::norm(cn);
    return w;
}

std::complex<double> SnapshotExpansion::coefficient(int n) const {
    if (n < 1) throw std::domain_error("SnapshotExpansion::coefficient: n must be >= 1");
    if (n % 2 == 0) return {0.0, 0.0};  // structural zero on the half line
    const std::size_t j = static_cast<std::size_t>((n - 1) / 2);
    if (j >= c.size()) return {0.0, 0.0};
    return c[j];
}

namespace {

// Closed-form coefficients: with ket width w = state.omega (Re w > 0), basis
// width b > 0, a = Re w and s = (b - w)/(b + w), the n = 1 state expands as
//   c_1      = 2 sqrt(2) (a b)^{3/4} / (b + w)^{3/2} * e^{-i (3/2) phi},
//   c_{2m+3} = c_{2m+1} * s * sqrt((2m + 3) / (2m + 2)),
// with the principal branch of the 3/2 power (Re(b + w) > 0 always). The
// series sums to |c_1|^2 (1 - |s|^2)^{-3/2} = 1 exactly: completeness holds
// for every valid (w, b) pair because |s| < 1.
SnapshotExpansion expand_closed_form(const GaussianHermiteState& state, double b, int n_max) {
    const std::complex<double> w = state.omega;
    const double a = w.real();
    const std::complex<double> bw = b + w;
    const std::complex<double> sigma = (b - w) / bw;

    SnapshotExpansion out;
    out.basis_omega = b;
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, -1.5 * state.phi));
    std::complex<double> cn =
        2.0 * std::sqrt(2.0) * std::pow(a * b, 0.75) / std::pow(bw, 1.5) * phase;
    out.c.reserve(static_cast<std::size_t>(n_max + 1) / 2);
    for (int n = 1; n <= n_max; n += 2) {
        out.c.push_back(cn);
        const int m = (n - 1) / 2;
        cn *= sigma * std::sqrt(double(2 * m + 3) / double(2 * m + 2));
    }
    return out;
}

// Reference path: composite Gauss-Kronrod quadrature of every coefficient in
// one sweep (the basis functions for all retained orders are generated per
// node by a single Hermite recurrence). Panels are refined until the summed
// Kronrod-Gauss discrepancy is below tolerance.
SnapshotExpansion expand_quadrature(const GaussianHermiteState& state, double b, int n_max) {
    const double a = state.omega.real();
    const double im = state.omega.imag();
    const int n_coeff = (n_max + 1) / 2;

    // Cutoff: cover both Gaussians and the classical turning point of the
    // highest retained basis order.
    const double s_tail = quadrature_cutoff(std::min(a, b));
    const double s_turn = std::sqrt(2.0 * n_max + 3.0) / std::sqrt(b) + 6.0 / std::sqrt(b);
    const double s_cut = std::max(s_tail, s_turn);

    // Panel width from the fastest local oscillation: basis Hermite wave
    // number sqrt(b (2 n_max + 1)) and ket chirp |Im w| S.
    const double k_herm = std::sqrt(b * (2.0 * n_max + 1.0));
    const double k_chirp = std::abs(im) * s_cut;
    const double k_ket = std::sqrt(a * 3.0);
    const double k_max = std::max({k_herm, k_chirp, k_ket, 1e-12});
    int panels = static_cast<int>(std::ceil(s_cut * k_max / kPi)) + 4;

    const double tol = 1e-12;
    std::vector<std::complex<double>> best;
    for (int refine = 0; refine < 4; ++refine) {
        std::vector<std::complex<double>> resk(n_coeff, {0.0, 0.0});
        std::vector<std::complex<double>> resg(n_coeff, {0.0, 0.0});
        std::vector<double> herm;
        const double prefactor = std::sqrt(2.0) * std::pow(b / kPi, 0.25);
        const double dp = s_cut / panels;
        // 15-point Kronrod nodes per panel; embedded 7-point Gauss for error.
        static constexpr double xgk[8] = {
            0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
            0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
        static constexpr double wgk[8] = {
            0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
            0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
        static constexpr double wg[4] = {
            0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};
        auto accumulate = [&](double S, double wk, double wgauss) {
            const std::complex<double> psi = state_amplitude(state, S);
            num::hermite_functions(n_max, std::sqrt(b) * S, herm);
            for (int j = 0; j < n_coeff; ++j) {
                const double basis = prefactor * herm[2 * j + 1];
                const std::complex<double> term = basis * psi;
                resk[j] += wk * term;
                if (wgauss != 0.0) resg[j] += wgauss * term;
            }
        };
        for (int p = 0; p < panels; ++p) {
            const double lo = p * dp;
            const double c = lo + 0.5 * dp;
            const double h = 0.5 * dp;
            accumulate(c, h * wgk[7], h * wg[3]);
            for (int i = 0; i < 7; ++i) {
                const double dx = h * xgk[i];
                const double wgauss = (i % 2 == 1) ? h * wg[i / 2] : 0.0;
                accumulate(c - dx, h * wgk[i], wgauss);
                accumulate(c + dx, h * wgk[i], wgauss);
            }
        }
        double err = 0.0;
        for (int j = 0; j < n_coeff; ++j) err += std::abs(resk[j] - resg[j]);
        best = std::move(resk);
        if (err < tol * std::max(1, n_coeff)) break;
        panels *= 2;
    }

    SnapshotExpansion out;
    out.basis_omega = b;
    out.c = std::move(best);
    return out;
}

}  // namespace

SnapshotExpansion expand_in_snapshot_basis(const GaussianHermiteState& state,
                                           double basis_omega, int n_max,
                                           ExpandMethod method) {
    state.validate();
    if (state.n != 1)
        throw std::domain_error("expand_in_snapshot_basis: only n = 1 states are expanded");
    if (!(basis_omega > 0.0))
        throw std::domain_error("expand_in_snapshot_basis: basis width must be > 0");
    if (n_max < 1 || n_max % 2 == 0)
        throw std::domain_error("expand_in_snapshot_basis: n_max must be odd and >= 1");
    return method == ExpandMethod::Recurrence ? expand_closed_form(state, basis_omega, n_max)
                                              : expand_quadrature(state, basis_omega, n_max);
}

}  // namespace thinspec
