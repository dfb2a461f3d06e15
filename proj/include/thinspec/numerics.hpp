#pragma once

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, normalized
// Hermite functions, banded/tridiagonal/pentadiagonal linear solvers,
// symmetric eigensolvers, an embedded Dormand-Prince 5(4) integrator with
// dense output, and root/extremum refinement helpers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace thinspec {

// Raised when an algorithm exceeds its accuracy or step budget. `diagnostics`
// carries a JSON fragment with context (failure time, step size, ...).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what, std::string diagnostics = "{}")
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const { return diagnostics_; }

  private:
    std::string diagnostics_;
};

namespace num {

using cplx = std::complex<double>;

// ----------------------------------------------------------------- quadrature

// Adaptive Gauss-Kronrod 7/15 quadrature of f on [a, b] to absolute
// tolerance `tol`. Intervals are bisected recursively with proportional
// tolerance allocation; recursion stops at `max_depth` (the result is then
// the best available estimate).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12, int max_depth = 30);
cplx integrate(const std::function<cplx(double)>& f, double a, double b,
               double tol = 1e-12, int max_depth = 30);

// -------------------------------------------------------------------- Hermite

// Normalized Hermite function with the Gaussian attached:
//     h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n!)
// evaluated through the stable three-term recurrence
//     h_{n+1} = x sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1},
// which keeps every intermediate O(1) for arbitrary n.
double hermite_function(int n, double x);

// All orders 0..n_max in one recurrence sweep; out.size() == n_max + 1.
void hermite_functions(int n_max, double x, std::vector<double>& out);

// ------------------------------------------------- banded LU (partial pivots)

// General banded LU factorization with partial pivoting, LAPACK-style band
// storage: entry A(i, j) lives at ab[j * ldab + (kl + ku + i - j)], with kl
// extra fill rows on top (ldab = 2 kl + ku + 1). T is double or complex.
template <class T>
class BandedLU {
  public:
    BandedLU(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1),
          ab_(static_cast<std::size_t>(ldab_) * n, T(0)), piv_(n, 0) {}

    int size() const { return n_; }

    // Valid for j - ku <= i <= j + kl; call before factor().
    T& at(int i, int j) { return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]; }

    void clear() { std::fill(ab_.begin(), ab_.end(), T(0)); }

    // Factor in place. Exact zero pivots are replaced by `tiny` (signless),
    // which makes the factorization usable for inverse iteration on
    // near-singular shifted matrices.
    void factor(double tiny = 0.0) {
        const int band_top = kl_ + ku_;
        for (int j = 0; j < n_; ++j) {
            const int km = std::min(kl_, n_ - 1 - j);
            // Pivot search in column j among rows j..j+km.
            int p = 0;
            double best = std::abs(ab_[idx(band_top, j)]);
            for (int i = 1; i <= km; ++i) {
                const double m = std::abs(ab_[idx(band_top + i, j)]);
                if (m > best) {
                    best = m;
                    p = i;
                }
            }
            piv_[j] = j + p;
            const int ju = std::min(j + ku_ + kl_, n_ - 1);
            if (p != 0) {
                for (int c = j; c <= ju; ++c)
                    std::swap(ab_[idx(band_top + j - c, c)], ab_[idx(band_top + j + p - c, c)]);
            }
            T pivot = ab_[idx(band_top, j)];
            if (std::abs(pivot) == 0.0) {
                pivot = T(tiny > 0.0 ? tiny : std::numeric_limits<double>::min());
                ab_[idx(band_top, j)] = pivot;
            }
            for (int i = 1; i <= km; ++i) ab_[idx(band_top + i, j)] /= pivot;
            for (int c = j + 1; c <= ju; ++c) {
                const T head = ab_[idx(band_top + j - c, c)];
                if (head != T(0)) {
                    for (int i = 1; i <= km; ++i)
                        ab_[idx(band_top + j + i - c, c)] -= ab_[idx(band_top + i, j)] * head;
                }
            }
        }
        factored_ = true;
    }

    // Solve A x = b in place (b overwritten with x).
    void solve(T* b) const {
        if (!factored_) throw std::logic_error("BandedLU::solve before factor");
        const int band_top = kl_ + ku_;
        for (int j = 0; j < n_; ++j) {
            if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
            const int km = std::min(kl_, n_ - 1 - j);
            for (int i = 1; i <= km; ++i) b[j + i] -= ab_[idx(band_top + i, j)] * b[j];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            b[j] /= ab_[idx(band_top, j)];
            const int top = std::max(0, j - ku_ - kl_);
            for (int i = top; i < j; ++i) b[i] -= ab_[idx(band_top + i - j, j)] * b[j];
        }
    }

    void solve(std::vector<T>& b) const { solve(b.data()); }

  private:
    std::size_t idx(int r, int j) const { return static_cast<std::size_t>(j) * ldab_ + r; }

    int n_, kl_, ku_, ldab_;
    std::vector<T> ab_;
    std::vector<int> piv_;
    bool factored_ = false;
};

// ------------------------------------------- unpivoted structured band solves

// Tridiagonal solve without pivoting (Thomas algorithm); requires diagonal
// dominance or an otherwise well-conditioned elimination, which holds for the
// Crank-Nicolson/Cayley matrices used in this project. dl, du have size n-1.
// b is overwritten with the solution. Workspaces are caller-provided so the
// hot loops stay allocation-free.
template <class T>
void solve_tridiagonal(const std::vector<T>& dl, const std::vector<T>& d,
                       const std::vector<T>& du, std::vector<T>& b,
                       std::vector<T>& work_c, std::vector<T>& work_d) {
    const std::size_t n = d.size();
    work_c.resize(n);
    work_d.resize(n);
    T den = d[0];
    work_c[0] = du.empty() ? T(0) : du[0] / den;
    work_d[0] = b[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = d[i] - dl[i - 1] * work_c[i - 1];
        work_c[i] = (i + 1 < n) ? du[i] / den : T(0);
        work_d[i] = (b[i] - dl[i - 1] * work_d[i - 1]) / den;
    }
    b[n - 1] = work_d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = work_d[i] - work_c[i] * b[i + 1];
}

// Symmetric pentadiagonal solver (LDL^T without pivoting) for the grid
// Crank-Nicolson matrices, which are strongly diagonally dominant. d: diag
// (size n), e: first superdiagonal (n-1), f: second superdiagonal (n-2).
// T is double or complex (complex symmetric, NOT Hermitian, is supported).
template <class T>
class SymPentaSolver {
  public:
    void factor(const std::vector<T>& d, const std::vector<T>& e, const std::vector<T>& f) {
        const std::size_t n = d.size();
        n_ = n;
        dinv_.resize(n);
        l1_.assign(n > 1 ? n - 1 : 0, T(0));
        l2_.assign(n > 2 ? n - 2 : 0, T(0));
        // D_i = d_i - l1_{i-1}^2 D_{i-1} - l2_{i-2}^2 D_{i-2}
        // l1_i D_i = e_i - l1_{i-1} l2_{i-1} D_{i-1};  l2_i D_i = f_i
        T D1 = T(0), D2 = T(0);          // D_{i-1}, D_{i-2}
        T l1p = T(0);                    // l1_{i-1}
        T l2p = T(0), l2pp = T(0);       // l2_{i-1}, l2_{i-2}
        for (std::size_t i = 0; i < n; ++i) {
            T Di = d[i];
            if (i >= 1) Di -= l1p * l1p * D1;
            if (i >= 2) Di -= l2pp * l2pp * D2;
            const T dinv = T(1) / Di;
            dinv_[i] = dinv;
            T l1c = T(0);
            if (i + 1 < n) {
                T rhs = e[i];
                if (i >= 1) rhs -= l1p * l2p * D1;
                l1c = rhs * dinv;
                l1_[i] = l1c;
            }
            T l2c = T(0);
            if (i + 2 < n) {
                l2c = f[i] * dinv;
                l2_[i] = l2c;
            }
            D2 = D1;
            D1 = Di;
            l2pp = l2p;
            l2p = l2c;
            l1p = l1c;
        }
        factored_ = true;
    }

    // Solve A x = b in place.
    void solve(std::vector<T>& b) const {
        if (!factored_) throw std::logic_error("SymPentaSolver::solve before factor");
        const std::size_t n = n_;
        // Forward: L y = b (unit lower triangular, subdiagonals l1, l2).
        for (std::size_t i = 1; i < n; ++i) {
            T acc = b[i] - l1_[i - 1] * b[i - 1];
            if (i >= 2) acc -= l2_[i - 2] * b[i - 2];
            b[i] = acc;
        }
        // Diagonal: z = D^{-1} y.
        for (std::size_t i = 0; i < n; ++i) b[i] *= dinv_[i];
        // Backward: L^T x = z.
        for (std::size_t i = n; i-- > 0;) {
            T acc = b[i];
            if (i + 1 < n) acc -= l1_[i] * b[i + 1];
            if (i + 2 < n) acc -= l2_[i] * b[i + 2];
            b[i] = acc;
        }
    }

  private:
    std::size_t n_ = 0;
    std::vector<T> dinv_, l1_, l2_;
    bool factored_ = false;
};

// ------------------------------------------------------ symmetric eigensolvers

// k-th smallest eigenvalue (k = 0 is the lowest) of the symmetric tridiagonal
// matrix with diagonal `diag` and off-diagonal `off`, by Sturm bisection to
// near machine precision.
double tridiag_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off, int k);

// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration
// (pivoted banded LU on the shifted matrix). Returned normalized, with a
// deterministic sign convention (largest-|component| entry positive).
std::vector<double> tridiag_eigenvector(const std::vector<double>& diag,
                                        const std::vector<double>& off, double lambda);

// Cyclic Jacobi eigensolver for small dense symmetric matrices. `a` is
// row-major n x n (only used on entry). Eigenvalues ascending; eigenvector
// j is stored in column j of `vecs` (row-major n x n).
void jacobi_eigensolve(std::vector<double> a, int n, std::vector<double>& vals,
                       std::vector<double>& vecs);

// --------------------------------------------------- Dormand-Prince 5(4) ODE

struct OdeOptions {
    double rtol = 1e-10;   // per-component relative tolerance
    double atol = 0.0;     // absolute floor added to the error scales
    double h_init = 0.0;   // 0: 1e-4 of the span
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 20000000;
};

// Continuous extension over one accepted step [t0, t0+h]; 4th-order accurate.
class DenseStep {
  public:
    double t_begin() const { return t_; }
    double t_end() const { return t_ + h_; }
    double h() const { return h_; }
    int dim() const { return dim_; }

    // Interpolate component `i` at time `t` within [t_begin, t_end].
    double eval(int i, double t) const {
        const double theta = (t - t_) / h_;
        const double theta1 = 1.0 - theta;
        const double* r = rcont_.data() + static_cast<std::size_t>(i) * 5;
        return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
    }
    void eval_all(double t, double* y) const {
        for (int i = 0; i < dim_; ++i) y[i] = eval(i, t);
    }

  private:
    friend struct Dopri5Impl;
    double t_ = 0.0, h_ = 0.0;
    int dim_ = 0;
    std::vector<double> rcont_;  // dim x 5
};

struct OdeResult {
    double t_final = 0.0;
    long accepted = 0;
    long rejected = 0;
    bool stopped_by_observer = false;
};

// Integrate y' = rhs(t, y) from t_begin to t_end with the Dormand-Prince
// embedded 5(4) pair (FSAL) and proportional step control.
//   rhs(t, y, dydt)     : derivative evaluation, y and dydt of size dim.
//   scale(y, s)         : fills the per-component error scales used in the
//                         weighted RMS error norm (pure-relative control when
//                         s_i ~ |y_i|); evaluated at the start of each step.
//   observer(step)      : called once per accepted step with the dense
//                         interpolant; return false to stop early.
// Throws NumericalError on step-size underflow or step-budget exhaustion.
OdeResult integrate_dopri5(int dim,
                           const std::function<void(double, const double*, double*)>& rhs,
                           double t_begin, double t_end, std::vector<double>& y,
                           const std::function<void(const double*, double*)>& scale,
                           const OdeOptions& opts = {},
                           const std::function<bool(const DenseStep&)>& observer = nullptr);

// ------------------------------------------------------------ roots & extrema

// Brent root refinement on [a, b] with f(a), f(b) of opposite sign.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol = 1e-13, int max_iter = 128);

// Vertex abscissa of the parabola through three points (x must be distinct).
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

// Golden-section maximization of f on [a, b] to within xtol.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-10);

}  // namespace num
}  // namespace thinspec
