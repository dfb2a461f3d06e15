#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "thinspec/ed.hpp"
#include "thinspec/model.hpp"
#include "thinspec/numerics.hpp"
#include "thinspec/static_spectrum.hpp"

using namespace thinspec;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> to_complex(const std::vector<double>& v) {
    return std::vector<cplx>(v.begin(), v.end());
}

}  // namespace

TEST_SUITE("ed") {
    TEST_CASE("closed-form ladder data for N = 4 by hand") {
        const auto ops = build_basis_and_operators(4);
        REQUIRE(ops.dim() == 3);
        // E(S)/J = (S(S+1) - 2 s(s+1))/N with s = 1.
        CHECK(ops.energy_over_J[0] == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(ops.energy_over_J[1] == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(ops.energy_over_J[2] == doctest::Approx(0.5).epsilon(1e-15));
        // <S+1,0|O|S,0> = (S+1) sqrt(((N/2+1)^2-(S+1)^2)/((2S+1)(2S+3))).
        CHECK(ops.coupling[0] == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-15));
        CHECK(ops.coupling[1] == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));

        CHECK_THROWS_AS(build_basis_and_operators(3), std::domain_error);
        CHECK_THROWS_AS(build_basis_and_operators(2), std::domain_error);
        CHECK_THROWS_AS(build_basis_and_operators(20002), std::domain_error);
    }

    TEST_CASE("closed-form elements equal the product-basis brute force") {
        // The closed form comes from angular-momentum algebra; the brute
        // force diagonalizes S^2 in the |m_A, -m_A> basis and reads the
        // element off the eigenvectors. Machine-precision agreement across
        // every rung validates both.
        for (int N : {4, 6, 8}) {
            const auto ops = build_basis_and_operators(N);
            for (int S = 0; S + 1 < ops.dim(); ++S) {
                const double brute = staggered_element_bruteforce(N, S);
                CHECK(std::abs(ops.coupling[static_cast<std::size_t>(S)] - brute) < 1e-12);
            }
        }
        CHECK_THROWS_AS(staggered_element_bruteforce(4, 2), std::domain_error);
        CHECK_THROWS_AS(staggered_element_bruteforce(4, -1), std::domain_error);
        CHECK_THROWS_AS(staggered_element_bruteforce(300, 0), std::domain_error);
    }

    TEST_CASE("zero field returns the exact singlet") {
        const auto ops = build_basis_and_operators(12);
        const auto gs = ed_ground_state(ops, 2.0, 0.0);
        CHECK(gs.energy == doctest::Approx(2.0 * ops.energy_over_J[0]).epsilon(1e-15));
        CHECK(gs.psi[0] == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t i = 1; i < gs.psi.size(); ++i) CHECK(gs.psi[i] == 0.0);
        CHECK(gs.order_parameter == 0.0);
        CHECK_THROWS_AS(ed_ground_state(ops, 0.0, 0.1), std::domain_error);
        CHECK_THROWS_AS(ed_ground_state(ops, 1.0, -0.1), std::domain_error);
    }

    TEST_CASE("N = 4 strong-field ground state against an independent solver") {
        const auto ops = build_basis_and_operators(4);
        const auto gs = ed_ground_state(ops, 1.0, 1.0);
        CHECK(gs.energy == doctest::Approx(-2.5985212496450427).epsilon(1e-12));
        CHECK(std::abs(gs.psi[0]) == doctest::Approx(0.69149915).epsilon(1e-7));
        CHECK(std::abs(gs.psi[1]) == doctest::Approx(0.67690184).epsilon(1e-7));
        CHECK(std::abs(gs.psi[2]) == doctest::Approx(0.25225547).epsilon(1e-7));
        CHECK(gs.order_parameter == doctest::Approx(3.846137067810191).epsilon(1e-10));
    }

    TEST_CASE("symmetry breaking grows monotonically with the field") {
        const auto ops = build_basis_and_operators(60);
        double prev_op = -1.0;
        double prev_e = 1.0;
        for (double H : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
            const auto gs = ed_ground_state(ops, 1.0, H);
            CHECK(gs.order_parameter >= prev_op);
            CHECK(gs.order_parameter >= 0.0);
            CHECK(gs.order_parameter <= 60.0);
            if (H > 0.0) CHECK(gs.energy < prev_e);
            prev_op = gs.order_parameter;
            prev_e = gs.energy;
        }
    }

    TEST_CASE("large-N ground state against an independent solver and the continuum") {
        const auto ops = build_basis_and_operators(400);
        ModelParams p;
        p.N = 400;

        // omega_S = 0.05: the Gaussian theory is near its validity center.
        const auto strong = ed_ground_state(ops, 1.0, 1e-2);
        CHECK(strong.energy == doctest::Approx(-52.410518986018).epsilon(1e-10));
        CHECK(strong.order_parameter == doctest::Approx(391.8280464303).epsilon(1e-8));
        CHECK(strong.order_parameter ==
              doctest::Approx(static_order_parameter(p, 1e-2)).epsilon(0.035));

        // omega_S = 0.5: the continuum leading form sits ~24% below the
        // lattice value at this width; freeze the lattice number itself.
        const auto mid = ed_ground_state(ops, 1.0, 1e-4);
        CHECK(mid.energy == doctest::Approx(-50.511374255551).epsilon(1e-10));
        CHECK(mid.order_parameter == doctest::Approx(301.0737738642).epsilon(1e-8));
    }

    TEST_CASE("order-parameter deviation from the continuum shrinks with N at fixed N^2 H") {
        // One rung of the scaling family N^2 H = 16 J (omega_S = 1/2 for all).
        double prev = 1.0;
        for (int N : {50, 100, 200}) {
            const auto ops = build_basis_and_operators(N);
            const double H = 16.0 / (static_cast<double>(N) * N);
            const auto gs = ed_ground_state(ops, 1.0, H);
            ModelParams p;
            p.N = N;
            const double cont = static_order_parameter(p, H);
            const double rel = std::abs(gs.order_parameter - cont) / cont;
            CHECK(rel < prev);
            prev = rel;
        }
        CHECK(prev == doctest::Approx(0.248041).epsilon(1e-3));
    }

    TEST_CASE("observables of the ground state at its own field") {
        const auto ops = build_basis_and_operators(40);
        const double J = 1.3, H = 0.07;
        const auto gs = ed_ground_state(ops, J, H);
        const auto obs = ed_observables(ops, J, H, to_complex(gs.psi));
        CHECK(obs.defect_density == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(obs.energy == doctest::Approx(gs.energy).epsilon(1e-12));
        CHECK(obs.order_parameter == doctest::Approx(gs.order_parameter).epsilon(1e-12));

        // A global phase changes nothing.
        auto rotated = to_complex(gs.psi);
        for (auto& c : rotated) c *= std::polar(1.0, 0.83);
        const auto obs2 = ed_observables(ops, J, H, rotated);
        CHECK(obs2.defect_density == doctest::Approx(obs.defect_density).epsilon(1e-12));
        CHECK(obs2.order_parameter == doctest::Approx(obs.order_parameter).epsilon(1e-12));
        CHECK(obs2.energy == doctest::Approx(obs.energy).epsilon(1e-12));

        // The singlet at a strong field is heavily defective.
        std::vector<cplx> singlet(static_cast<std::size_t>(ops.dim()), {0.0, 0.0});
        singlet[0] = 1.0;
        const auto obs3 = ed_observables(ops, J, 1.0, singlet);
        CHECK(obs3.defect_density > 0.5);
        CHECK(obs3.defect_density <= 1.0);
        CHECK(obs3.order_parameter == doctest::Approx(0.0).epsilon(1e-14));

        std::vector<cplx> short_state(3, {0.5, 0.0});
        CHECK_THROWS_AS(ed_observables(ops, J, H, short_state), std::domain_error);
        auto unnormalized = to_complex(gs.psi);
        for (auto& c : unnormalized) c *= 1.5;
        CHECK_THROWS_AS(ed_observables(ops, J, H, unnormalized), std::domain_error);
    }

    TEST_CASE("stationary evolution control: frozen field preserves the ground state") {
        ModelParams p;
        p.N = 60;
        p.H0 = 0.05;
        p.delta = 0.0;  // legal for the ED clock: H(t) = H0 throughout
        std::vector<double> grid;
        for (int i = 0; i <= 10; ++i) grid.push_back(2.0 * i);
        const auto series = ed_evolve(p, 20.0, grid);
        REQUIRE(series.t.size() == grid.size());
        CHECK(series.norm_drift < 1e-10);

        const auto ops = build_basis_and_operators(p.N);
        const auto gs = ed_ground_state(ops, p.J, p.H0);
        for (const auto& psi : series.psi) {
            const auto obs = ed_observables(ops, p.J, p.H0, psi);
            CHECK(std::abs(obs.order_parameter - gs.order_parameter) < 1e-8);
            CHECK(std::abs(obs.defect_density) < 1e-10);
            CHECK(obs.energy == doctest::Approx(gs.energy).epsilon(1e-10));
        }
    }

    TEST_CASE("ramped evolution stays unitary and accumulates defects") {
        ModelParams p;
        p.N = 60;
        p.H0 = 1e-3;
        p.delta = 3e-3;
        std::vector<double> grid = {0.0, 2.5, 5.0, 7.5, 10.0};
        const auto series = ed_evolve(p, 10.0, grid);
        CHECK(series.norm_drift < 1e-10);
        CHECK(series.dt_used > 0.0);
        CHECK(series.steps > 0);

        const auto ops = build_basis_and_operators(p.N);
        const auto first = ed_observables(ops, p.J, p.H0, series.psi.front());
        const auto last =
            ed_observables(ops, p.J, p.H0 + p.delta * 10.0, series.psi.back());
        CHECK(first.defect_density < 1e-12);
        CHECK(last.defect_density > 1e-6);
    }

    TEST_CASE("unmeetable error budget raises a diagnosed numerical error") {
        ModelParams p;
        p.N = 20;
        p.H0 = 0.05;
        p.delta = 0.5;
        EdOptions opts;
        opts.error_budget = 1e-18;
        opts.max_halvings = 0;
        try {
            ed_evolve(p, 5.0, {5.0}, opts);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(std::string(e.diagnostics()).find("projected_error") != std::string::npos);
        }
    }

    TEST_CASE("evolution input validation") {
        ModelParams p;
        p.N = 20;
        p.H0 = 0.05;
        CHECK_THROWS_AS(ed_evolve(p, 0.0, {}), std::domain_error);
        CHECK_THROWS_AS(ed_evolve(p, 5.0, {3.0, 1.0}), std::domain_error);
        CHECK_THROWS_AS(ed_evolve(p, 5.0, {6.0}), std::domain_error);
    }
}
