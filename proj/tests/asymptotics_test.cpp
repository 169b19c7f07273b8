#include "mgg/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"

using namespace mgg;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> ladder() { return geometric_ladder(10.0, 1e4, 40); }
}  // namespace

TEST_CASE("fit recovers a quadratic exactly") {
    const auto p = TauParams::from_tau(kPi / 6);
    const Sym2 A{1.4, 0.2, 0.9};
    const Vec2 beta{0.3, -0.7};
    const auto sol = quadratic_solution(p, A, beta, 1.25);
    const auto c = fit_expansion(sol, ladder(), 128);
    CHECK((*c.A - A).max_abs() < 1e-10);
    CHECK((*c.beta - beta).norm() < 1e-9);
    CHECK(*c.gamma == doctest::Approx(1.25).epsilon(1e-8));
    CHECK(std::abs(*c.d) < 1e-8);
    CHECK(std::abs(*c.d1) < 1e-6);
    CHECK(std::abs(*c.d2) < 1e-6);
}

TEST_CASE("fit matches the closed-form radial families") {
    SUBCASE("det = e^{2 C0} family") {
        const auto sol = ma_radial_exact(0.0, 1.0);
        const auto t = *sol.truth();
        const auto c = fit_expansion(sol, ladder(), 256);
        CHECK((*c.A - *t.A).max_abs() < 1e-8);
        CHECK((*c.beta).norm() < 1e-8);
        CHECK(*c.gamma == doctest::Approx(*t.gamma).epsilon(1e-5));
        CHECK(*c.d == doctest::Approx(*t.d).epsilon(1e-6));
        CHECK(std::abs(*c.d1) < 1e-4);
    }
    SUBCASE("special Lagrangian radial") {
        const auto sol = sl_radial_exact(1.0);
        const auto t = *sol.truth();
        const auto c = fit_expansion(sol, ladder(), 256);
        CHECK((*c.A - Sym2::identity()).max_abs() < 1e-8);
        CHECK(*c.d == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(*c.gamma == doctest::Approx(*t.gamma).epsilon(1e-5));
    }
    SUBCASE("translated solution picks up d1") {
        AffineFrame f;
        f.x0 = {0.25, 0.0};  // u(x - x0): d1 = -2 d q11^{1/2} x01 = -0.5
        const auto sol = transform(ma_radial_exact(0.0, 4.0), f);
        const auto t = *sol.truth();
        const auto c = fit_expansion(sol, ladder(), 256);
        CHECK(*t.d1 == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(*c.d1 == doctest::Approx(-0.5).epsilon(1e-3));
        CHECK(std::abs(*c.d2 - *t.d2) < 1e-3);
        CHECK((*c.beta - *t.beta).norm() < 1e-7);
    }
}

TEST_CASE("remainder certificate on an exact family") {
    const auto sol = ma_radial_exact(0.0, 1.0);
    const auto cert = remainder_check(sol, *sol.truth(), ladder(), 128);
    CHECK(cert.slope_estimate <= -1.8);
}

TEST_CASE("flux vanishes on quadratics and matches radial oracles") {
    SUBCASE("quadratic, MA branch") {
        const auto sol = quadratic_solution(TauParams::from_tau(0.0),
                                            Sym2::diag(2.0, 0.5), {0.0, 0.0}, 0.0);
        const double d = flux_d(sol, sol.tau(), sol.c0(), 20.0, 512, FluxFormula::MA);
        CHECK(std::abs(d) < 1e-12);
    }
    SUBCASE("radial MA oracle d = c1 e^{-C0} / 4") {
        const auto sol = ma_radial_exact(0.3, 0.8);
        const auto rep = flux_independence(sol, sol.tau(), sol.c0(),
                                           {5.0, 10.0, 20.0}, 512, FluxFormula::MA);
        for (double d : rep.d_values)
            CHECK(d == doctest::Approx(*sol.truth()->d).epsilon(1e-8));
        CHECK(rep.spread < 1e-9);
    }
    SUBCASE("radial SL oracle d = c1 / 4") {
        const auto sol = sl_radial_exact(2.0);
        const double d = flux_d(sol, sol.tau(), sol.c0(), 15.0, 512, FluxFormula::SL);
        CHECK(d == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("three-term general formula") {
        // u = m - |x|^2/2 with det D^2 m = e^{2 C0}: shift 1, d transported
        // from the unit-determinant dual scaling
        const auto m = ma_radial_exact(0.0, 1.0);
        auto u = custom_solution(m.tau(), m.c0(), 1.0, 1e6, [m](const Vec2& x) {
            EvalResult e = m.eval(x);
            return EvalResult{e.value - 0.5 * x.dot(x), e.grad - x,
                              e.hess - Sym2::identity()};
        });
        GeneralCoeffs g{0.0, 1.0, 1.0};
        const auto rep = flux_independence(u, u.tau(), 0.0, {10.0, 20.0, 40.0},
                                           512, FluxFormula::General, &g);
        CHECK(rep.spread < 1e-8 * (1.0 + std::abs(rep.d_values[0])));
    }
}

TEST_CASE("quadrature self-tests pass on a smooth solution") {
    const auto sol = ma_radial_exact(0.2, 1.0);
    const auto q = quadrature_selftests(sol, 12.0, 512);
    CHECK(q.closed_hessian_flux < 1e-10);
    CHECK(q.constant_flux < 1e-10);
    CHECK(q.lemma_gap < 1e-8);
}

TEST_CASE("symmetry check accepts symmetric and flags broken solutions") {
    const auto sol = ma_radial_exact(0.0, 1.0);
    ExpansionCoeffs c = *sol.truth();
    const auto rep = symmetry_check(sol, c, 200, 42);
    CHECK(rep.reflections_tested == 600);  // 3 sign patterns per sample
    CHECK(rep.max_violation < 1e-10);

    // add an odd cubic perturbation: reflection in x1 must fail
    auto bad = custom_solution(sol.tau(), sol.c0(), 1.0, 1e6, [sol](const Vec2& x) {
        EvalResult e = sol.eval(x);
        const double eps = 1e-3;
        e.value += eps * x.x1 * x.x1 * x.x1;
        e.grad = e.grad + Vec2{3.0 * eps * x.x1 * x.x1, 0.0};
        e.hess = e.hess + Sym2{6.0 * eps * x.x1, 0.0, 0.0};
        return e;
    });
    const auto rep2 = symmetry_check(bad, c, 200, 42);
    CHECK(rep2.max_violation > 1e-3);
}

TEST_CASE("radiality check on affine images of the radial family") {
    const Sym2 B{1.2, 0.3, (1.0 + 0.3 * 0.3) / 1.2};  // det 1
    REQUIRE(B.det() == doctest::Approx(1.0).epsilon(1e-12));
    const auto sol = ma_affine(0.0, 1.0, B);
    const auto rep = radiality_check(sol, 0.0, *sol.truth()->A, 8);
    CHECK(rep.pass);
    CHECK(rep.max_spread < 1e-8);

    // with the wrong quadratic form the level sets are not level
    const auto rep2 = radiality_check(sol, 0.0, Sym2::identity(), 8);
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.max_spread > 1e-4);
}
