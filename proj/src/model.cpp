#include "thinspec/model.hpp"

#include <string>

namespace thinspec {

void ModelParams::validate(bool for_ed) const {
    if (!(J > 0.0)) throw std::domain_error("ModelParams: J must be > 0");
    // The exact-diagonalization clock is H(t) = H0 + delta t from t = 0, so a
    // frozen schedule (delta = 0) is a legal stationarity control there; the
    // continuum schedule H(t) = delta t needs delta > 0 for t0 = H0/delta.
    if (for_ed ? !(delta >= 0.0) : !(delta > 0.0))
        throw std::domain_error(for_ed ? "ModelParams: delta must be >= 0"
                                       : "ModelParams: delta must be > 0");
    if (!(H0 >= 0.0)) throw std::domain_error("ModelParams: H0 must be >= 0");
    if (!(hbar > 0.0)) throw std::domain_error("ModelParams: hbar must be > 0");
    if (N < 4 || (N % 2) != 0)
        throw std::domain_error("ModelParams: N must be even and >= 4");
}

double field_at(const ModelParams& p, double t) {
    // Allow a relative slack of a few ulps at the start point so that
    // t = t0 computed by callers via H0/delta never trips the check.
    const double t0 = p.t0();
    if (t < t0 * (1.0 - 8e-16) - 8e-300)
        throw std::domain_error("field_at: before schedule start (t < t0)");
    if (t <= t0) return p.H0;  // exactness at the start point
    return p.delta * t;
}

double freeze_out_time(const ModelParams& p) {
    return std::cbrt(p.hbar * p.hbar / (p.J * p.delta));
}

double static_omega(const ModelParams& p, double H) {
    if (!(H > 0.0))
        throw std::domain_error("static_omega: H must be > 0 (width undefined at the symmetric point)");
    return std::sqrt(4.0 * p.J / H) / static_cast<double>(p.N);
}

double renormalized_field(const ModelParams& p, double H) {
    if (!(H > 0.0)) throw std::domain_error("renormalized_field: H must be > 0");
    const double denom = std::cbrt(p.hbar * p.hbar * p.delta * p.delta / (2.0 * p.J));
    return H * p.H0 / denom;
}

double reconstruction_field(const ModelParams& p, double H) {
    if (!(H > 0.0)) throw std::domain_error("reconstruction_field: H must be > 0");
    const double denom = std::cbrt(p.hbar * p.hbar * p.delta * p.delta / p.J);
    return H * p.H0 / denom;
}

}  // namespace thinspec
