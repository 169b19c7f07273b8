#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "mgg/solutions.hpp"

using namespace mgg;

namespace {
constexpr double kPi = std::numbers::pi;

/// Central finite differences of the value against the reported derivatives.
void check_derivatives(const ExteriorSolution& sol, const Vec2& x, double tol) {
    const double h = 1e-5 * (1.0 + x.norm());
    const auto e = sol.eval(x);
    const double dx1 =
        (sol.value({x.x1 + h, x.x2}) - sol.value({x.x1 - h, x.x2})) / (2 * h);
    const double dx2 =
        (sol.value({x.x1, x.x2 + h}) - sol.value({x.x1, x.x2 - h})) / (2 * h);
    CHECK(std::abs(dx1 - e.grad.x1) <= tol);
    CHECK(std::abs(dx2 - e.grad.x2) <= tol);
    const double d11 = (sol.value({x.x1 + h, x.x2}) - 2 * e.value +
                        sol.value({x.x1 - h, x.x2})) /
                       (h * h);
    const double d22 = (sol.value({x.x1, x.x2 + h}) - 2 * e.value +
                        sol.value({x.x1, x.x2 - h})) /
                       (h * h);
    CHECK(std::abs(d11 - e.hess.m11) <= 100 * tol);
    CHECK(std::abs(d22 - e.hess.m22) <= 100 * tol);
}
}  // namespace

TEST_CASE("ma_radial_exact has exact Hessian determinant") {
    for (double C0 : {0.0, std::log(2.0), 0.3})
        for (double c1 : {0.0, 1.0, 2.0}) {
            const auto sol = ma_radial_exact(C0, c1);
            std::mt19937_64 rng(17);
            std::uniform_real_distribution<double> unit(1.0, 50.0);
            for (int i = 0; i < 20; ++i) {
                const Vec2 x{unit(rng), unit(rng)};
                CHECK(sol.hessian(x).det() ==
                      doctest::Approx(std::exp(2.0 * C0)).epsilon(1e-12));
            }
            CHECK(*sol.truth()->d ==
                  doctest::Approx(c1 * std::exp(-C0) / 4.0).epsilon(1e-15));
        }
}

TEST_CASE("radial value derivatives are consistent") {
    const auto sol = ma_radial_exact(0.2, 1.5);
    check_derivatives(sol, {3.0, 4.0}, 1e-6);
    check_derivatives(sol, {-7.0, 2.0}, 1e-6);
}

TEST_CASE("sl_radial_exact satisfies the special Lagrangian equation") {
    for (double c1 : {1.0, 2.0}) {
        const auto sol = sl_radial_exact(c1);
        CHECK(sol.c0() == doctest::Approx(kPi / 2).epsilon(1e-15));
        for (double r : {2.0, 11.0, 300.0}) {
            const auto h = sol.hessian({r, 0.0});
            CHECK(std::atan(h.m11) + std::atan(h.m22) ==
                  doctest::Approx(kPi / 2).epsilon(1e-13));
        }
        CHECK(*sol.truth()->d == doctest::Approx(c1 / 4.0).epsilon(1e-15));
    }
}

TEST_CASE("prefactor variant is the det-consistent family reparametrized") {
    const double C0 = 0.3, c1 = 1.0;
    const auto variant = ma_radial_prefactor_variant(C0, c1);
    const auto same = ma_radial_exact(2.0 * C0, c1 * std::exp(3.0 * C0));
    for (double r : {2.0, 7.0, 40.0}) {
        CHECK(variant.value({r, 0.0}) ==
              doctest::Approx(same.value({r, 0.0})).epsilon(1e-13));
    }
    // its determinant is e^{4 C0}, not e^{2 C0}
    CHECK(variant.hessian({5.0, 1.0}).det() ==
          doctest::Approx(std::exp(4.0 * C0)).epsilon(1e-12));
}

TEST_CASE("quadratic solution carries its own truth") {
    const auto p = TauParams::from_tau(kPi / 2);
    const Sym2 A{1.0, 0.2, 0.5};
    const auto sol = quadratic_solution(p, A, {0.3, -0.1}, 2.0);
    const auto e = sol.eval({2.0, -1.0});
    CHECK(e.value == doctest::Approx(0.5 * A.quad({2.0, -1.0}) + 0.3 * 2.0 +
                                     0.1 + 2.0)
                         .epsilon(1e-14));
    CHECK((e.hess - A).max_abs() == 0.0);
    CHECK(*sol.truth()->d == 0.0);
    CHECK_THROWS_AS(quadratic_solution(TauParams::from_tau(0.0),
                                       Sym2::diag(-1.0, 1.0), {0, 0}, 0.0),
                    InadmissibleEigenvalues);
}

TEST_CASE("radial ODE reproduces the closed-form MA family") {
    const double C0 = 0.1, c1 = 1.0;
    const double kappa = std::exp(C0);
    const double r0 = 1.0;
    const double p0 = std::sqrt(kappa * kappa * r0 * r0 + c1);
    const auto prof = radial_ode_solve(TauParams::from_tau(0.0), C0, r0, p0, 500.0);
    const auto sol = make_solution(prof);
    for (double r : {1.7, 23.0, 404.0}) {
        const double want = std::sqrt(kappa * kappa * r * r + c1);
        const auto g = sol.gradient({r, 0.0});
        CHECK(std::abs(g.x1 - want) <= 1e-10 * (1.0 + want));
    }
}

TEST_CASE("radial ODE profiles satisfy the equation pointwise") {
    for (double tau : {kPi / 6, kPi / 4, 3 * kPi / 8, kPi / 2}) {
        const auto p = TauParams::from_tau(tau);
        const double C0 = f_tau(p, 1.0, 1.0);
        const auto sol = make_solution(radial_ode_solve(p, C0, 1.0, 1.3, 800.0));
        for (double r : {1.3, 5.0, 77.7, 600.0})
            for (double th : {0.1, 2.0}) {
                const auto e = eigen_sym2(
                    sol.hessian({r * std::cos(th), r * std::sin(th)}));
                CHECK(std::abs(f_tau(p, e.lambda1, e.lambda2) - C0) <= 1e-10);
            }
    }
}

TEST_CASE("radial ODE rejects unattainable starts") {
    const auto p = TauParams::from_tau(kPi / 2);
    // C0 = pi/2 requires lambda2 = p/r > 0 at the start
    CHECK_THROWS_AS(radial_ode_solve(p, 3.0, 1.0, -0.5, 100.0), RangeExceeded);
}

TEST_CASE("transform transports the ground truth") {
    const auto base = ma_radial_exact(0.0, 1.0);
    AffineFrame fr;
    fr.x0 = {1.0, 0.0};
    fr.beta_add = {0.2, -0.3};
    fr.gamma_add = 1.5;
    const auto moved = transform(base, fr);
    const auto& t = *moved.truth();
    CHECK((*t.A - Sym2::identity()).max_abs() <= 1e-14);
    // beta = -A x0 + beta_add
    CHECK(t.beta->x1 == doctest::Approx(-1.0 + 0.2).epsilon(1e-14));
    CHECK(t.beta->x2 == doctest::Approx(-0.3).epsilon(1e-14));
    // d1 = -2 d (Q^{1/2} x0)_1 with d = 1/4, Q = I
    CHECK(*t.d1 == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(*t.d2 == doctest::Approx(0.0).epsilon(1e-13));
    // values agree with the definition
    const Vec2 x{8.0, 3.0};
    CHECK(moved.value(x) ==
          doctest::Approx(base.value(x - fr.x0) + fr.beta_add.dot(x) +
                          fr.gamma_add)
              .epsilon(1e-13));
}

TEST_CASE("rotation transport conjugates A") {
    const Sym2 B{1.2, 0.1, 1.0 / (1.2 - 0.1 * 0.1 / 1.0)};
    // normalize det(B) = 1 before using it
    const double s = 1.0 / std::sqrt(B.det());
    const Sym2 Bn = B * s;
    const auto base = ma_affine(0.0, 1.0, Bn);
    AffineFrame fr;
    fr.rotation_angle = 0.7;
    const auto rot = transform(base, fr);
    const Sym2 want = conjugate_by_rotation(*base.truth()->A, 0.7);
    CHECK((*rot.truth()->A - want).max_abs() <= 1e-13);
    const Vec2 x{5.0, 2.0};
    const double c = std::cos(0.7), sn = std::sin(0.7);
    const Vec2 back{c * x.x1 + sn * x.x2, -sn * x.x1 + c * x.x2};
    CHECK(rot.value(x) == doctest::Approx(base.value(back)).epsilon(1e-13));
}

TEST_CASE("domain bounds are enforced") {
    const auto p = TauParams::from_tau(kPi / 2);
    const double C0 = f_tau(p, 1.0, 1.0);
    const auto sol = make_solution(radial_ode_solve(p, C0, 1.0, 1.3, 100.0));
    CHECK_THROWS_AS(sol.value({0.5, 0.0}), DomainViolation);
    CHECK_THROWS_AS(sol.value({200.0, 0.0}), DomainViolation);
}

TEST_CASE("descriptor round trip") {
    const auto sol = ma_radial_exact(0.2, 1.5);
    const auto back = ExteriorSolution::from_json(sol.to_json());
    CHECK(back.value({3.0, 4.0}) ==
          doctest::Approx(sol.value({3.0, 4.0})).epsilon(1e-15));

    const auto p = TauParams::from_tau(kPi / 6);
    const double C0 = f_tau(p, 1.0, 1.0);
    const auto ode = make_solution(radial_ode_solve(p, C0, 1.0, 1.3, 200.0));
    const auto ode_back = ExteriorSolution::from_json(ode.to_json());
    CHECK(ode_back.value({30.0, 4.0}) ==
          doctest::Approx(ode.value({30.0, 4.0})).epsilon(1e-12));
}

TEST_CASE("ring samples round trip through CSV") {
    const auto sol = ma_radial_exact(0.0, 1.0);
    const auto rings = sample_rings(sol, {2.0, 4.0, 8.0}, 16);
    const auto back = RingSamples::from_csv(rings.hessian.to_csv());
    REQUIRE(back.radii.size() == 3);
    REQUIRE(back.comps.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            CHECK(back.comps[1][i][j] == rings.hessian.comps[1][i][j]);
}
