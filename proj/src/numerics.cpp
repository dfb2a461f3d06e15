#include "thinspec/numerics.hpp"

#include <cstdio>

namespace thinspec::num {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; the rule
// is symmetric). Even-indexed Kronrod nodes interlace the 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0000000000000000};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class R>
struct GkPanel {
    R value;
    double error;
};

template <class R, class F>
GkPanel<R> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    R resk = kWgk[7] * f(c);
    R resg = kWg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const R fsum = f(c - dx) + f(c + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    resk *= h;
    resg *= h;
    return {resk, std::abs(resk - resg)};
}

template <class R, class F>
R integrate_adaptive(const F& f, double a, double b, double tol, int max_depth) {
    struct Seg {
        double a, b, tol;
        int depth;
    };
    // Error floor tied to the magnitude of the whole-interval estimate: below
    // it, bisection only churns roundoff.
    const GkPanel<R> whole = gk15<R>(f, a, b);
    const double floor_err = 1e-15 * std::abs(whole.value) + 1e-300;
    if (whole.error <= std::max(tol, floor_err)) return whole.value;

    R total = R(0);
    std::vector<Seg> stack;
    stack.push_back({a, b, tol, 0});
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const GkPanel<R> p = gk15<R>(f, s.a, s.b);
        if (p.error <= std::max(s.tol, floor_err) || s.depth >= max_depth) {
            total += p.value;
        } else {
            const double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, 0.5 * s.tol, s.depth + 1});
            stack.push_back({m, s.b, 0.5 * s.tol, s.depth + 1});
        }
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth) {
    return integrate_adaptive<double>(f, a, b, tol, max_depth);
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b,
               double tol, int max_depth) {
    return integrate_adaptive<cplx>(f, a, b, tol, max_depth);
}

// ---------------------------------------------------------------------- Hermite

double hermite_function(int n, double x) {
    if (n < 0) throw std::domain_error("hermite_function: n must be >= 0");
    const double g = std::exp(-0.5 * x * x);
    if (n == 0) return g;
    double hm = g;                                // h_0
    double h = std::sqrt(2.0) * x * g;            // h_1
    for (int k = 1; k < n; ++k) {
        const double hn = x * std::sqrt(2.0 / (k + 1)) * h - std::sqrt(double(k) / (k + 1)) * hm;
        hm = h;
        h = hn;
    }
    return h;
}

void hermite_functions(int n_max, double x, std::vector<double>& out) {
    if (n_max < 0) throw std::domain_error("hermite_functions: n_max must be >= 0");
    out.resize(static_cast<std::size_t>(n_max) + 1);
    const double g = std::exp(-0.5 * x * x);
    out[0] = g;
    if (n_max == 0) return;
    out[1] = std::sqrt(2.0) * x * g;
    for (int k = 1; k < n_max; ++k)
        out[k + 1] = x * std::sqrt(2.0 / (k + 1)) * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
}

// ------------------------------------------------------ symmetric eigensolvers

namespace {

// Number of eigenvalues of the symmetric tridiagonal matrix strictly below x
// (Sturm sequence on the shifted LDL^T pivots, with underflow safeguarding).
int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    const std::size_t n = diag.size();
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        double denom = q;
        if (denom == 0.0) denom = 1e-300;
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

}  // namespace

double tridiag_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off, int k) {
    const std::size_t n = diag.size();
    if (n == 0) throw std::domain_error("tridiag_eigenvalue: empty matrix");
    if (off.size() + 1 != n) throw std::domain_error("tridiag_eigenvalue: off size mismatch");
    if (k < 0 || static_cast<std::size_t>(k) >= n)
        throw std::domain_error("tridiag_eigenvalue: index out of range");
    // Gershgorin bounds.
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double span = std::max(hi - lo, 1e-300);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(diag, off, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> tridiag_eigenvector(const std::vector<double>& diag,
                                        const std::vector<double>& off, double lambda) {
    const std::size_t n = diag.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(off[i]));
    const double tiny = std::max(scale, 1.0) * 1e-300;

    BandedLU<double> lu(static_cast<int>(n), 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        lu.at(static_cast<int>(i), static_cast<int>(i)) = diag[i] - lambda;
        if (i + 1 < n) {
            lu.at(static_cast<int>(i + 1), static_cast<int>(i)) = off[i];
            lu.at(static_cast<int>(i), static_cast<int>(i + 1)) = off[i];
        }
    }
    lu.factor(tiny);

    std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
    for (int it = 0; it < 6; ++it) {
        lu.solve(v);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    // Deterministic sign: largest-magnitude component positive.
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0.0)
        for (double& x : v) x = -x;
    return v;
}

void jacobi_eigensolve(std::vector<double> a, int n, std::vector<double>& vals,
                       std::vector<double>& vecs) {
    auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    vecs.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto V = [&](int i, int j) -> double& { return vecs[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) V(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double offnorm = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) offnorm += A(i, j) * A(i, j);
        if (std::sqrt(offnorm) < 1e-14 * std::max(1.0, std::abs(A(0, 0)))) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    const double apj = A(p, j), aqj = A(q, j);
                    A(p, j) = c * apj - s * aqj;
                    A(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    // Sort ascending (stable column permutation).
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i) < A(j, j); });
    vals.resize(n);
    std::vector<double> sorted(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        vals[j] = A(order[j], order[j]);
        for (int i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i) * n + j] = V(i, order[j]);
    }
    vecs.swap(sorted);
}

// --------------------------------------------------- Dormand-Prince 5(4) ODE

namespace {

// Butcher tableau of the Dormand-Prince 5(4) pair.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Error coefficients e = b5 - b4.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (continuous extension of order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace

struct Dopri5Impl {
    static void fill_dense(DenseStep& ds, double t, double h, int dim,
                           const std::vector<double>& y0, const std::vector<double>& y1,
                           const std::vector<double>& k1, const std::vector<double>& k3,
                           const std::vector<double>& k4, const std::vector<double>& k5,
                           const std::vector<double>& k6, const std::vector<double>& k7) {
        ds.t_ = t;
        ds.h_ = h;
        ds.dim_ = dim;
        ds.rcont_.resize(static_cast<std::size_t>(dim) * 5);
        for (int i = 0; i < dim; ++i) {
            double* r = ds.rcont_.data() + static_cast<std::size_t>(i) * 5;
            const double ydiff = y1[i] - y0[i];
            const double bspl = h * k1[i] - ydiff;
            r[0] = y0[i];
            r[1] = ydiff;
            r[2] = bspl;
            r[3] = ydiff - h * k7[i] - bspl;
            r[4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                        d7 * k7[i]);
        }
    }
};

OdeResult integrate_dopri5(int dim,
                           const std::function<void(double, const double*, double*)>& rhs,
                           double t_begin, double t_end, std::vector<double>& y,
                           const std::function<void(const double*, double*)>& scale,
                           const OdeOptions& opts,
                           const std::function<bool(const DenseStep&)>& observer) {
    if (static_cast<int>(y.size()) != dim)
        throw std::domain_error("integrate_dopri5: state size mismatch");
    const double span = t_end - t_begin;
    if (!(span > 0.0)) throw std::domain_error("integrate_dopri5: t_end must exceed t_begin");

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    std::vector<double> ytmp(dim), ynew(dim), err(dim), sc(dim);

    double t = t_begin;
    double h = opts.h_init > 0.0 ? opts.h_init : 1e-4 * span;
    h = std::min(h, opts.h_max);
    OdeResult res;
    DenseStep ds;

    rhs(t, y.data(), k1.data());  // FSAL seed
    bool last_rejected = false;

    while (t < t_end) {
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(t), std::abs(t_end));
        if (t_end - t < h_floor) {
            t = t_end;  // arrived within roundoff of the endpoint
            break;
        }
        if (t + h > t_end) h = t_end - t;
        if (h < h_floor) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "{\"t\":%.17g,\"h\":%.17g}", t, h);
            throw NumericalError("integrate_dopri5: step size underflow", buf);
        }
        if (res.accepted + res.rejected >= opts.max_steps) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "{\"t\":%.17g,\"steps\":%ld,\"max_steps\":%ld}", t,
                          res.accepted + res.rejected, opts.max_steps);
            throw NumericalError("integrate_dopri5: step budget exhausted", buf);
        }

        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp.data(), k2.data());
        for (int i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp.data(), k3.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp.data(), k4.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp.data(), k5.data());
        for (int i = 0; i < dim; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp.data(), k6.data());
        for (int i = 0; i < dim; ++i)
            ynew[i] = y[i] +
                      h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, ynew.data(), k7.data());

        scale(y.data(), sc.data());
        double err_norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double w = opts.rtol * std::abs(sc[i]) + opts.atol + 1e-300;
            const double r = ei / w;
            err_norm += r * r;
        }
        err_norm = std::sqrt(err_norm / dim);

        if (err_norm <= 1.0) {
            ++res.accepted;
            Dopri5Impl::fill_dense(ds, t, h, dim, y, ynew, k1, k3, k4, k5, k6, k7);
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (observer && !observer(ds)) {
                res.stopped_by_observer = true;
                break;
            }
            const double fac =
                std::min(last_rejected ? 1.0 : 10.0,
                         std::max(0.2, 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2)));
            h = std::min(h * fac, opts.h_max);
            last_rejected = false;
        } else {
            ++res.rejected;
            const double fac = std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            h *= fac;
            last_rejected = true;
        }
    }
    res.t_final = t;
    return res;
}

// ------------------------------------------------------------ roots & extrema

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol, int max_iter) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::domain_error("brent_root: endpoints do not bracket a root");
    double c = a, fc = fa;
    double d = b - a, e = b - a;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (x1 - x0) * (y1 - y2);
    const double d2 = (x1 - x2) * (y1 - y0);
    const double denom = 2.0 * (d1 - d2);
    if (denom == 0.0) return x1;  // degenerate: flat triple
    return x1 - ((x1 - x0) * d1 - (x1 - x2) * d2) / denom;
}

double golden_max(const std::function<double(double)>& f, double a, double b, double xtol) {
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace thinspec::num
