#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "mgg/operators.hpp"

using namespace mgg;

namespace {
constexpr double kPi = std::numbers::pi;

double random_admissible(const TauParams& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto adm = admissibility_for(p);
    const double lo = adm.lower_bound ? *adm.lower_bound : -3.0;
    return lo + 0.05 + 4.0 * unit(rng);
}
}  // namespace

TEST_CASE("branch selection") {
    CHECK(TauParams::from_tau(0.0).branch == Branch::MA);
    CHECK(TauParams::from_tau(kPi / 8).branch == Branch::LogQuotient);
    CHECK(TauParams::from_tau(kPi / 4).branch == Branch::InverseHarmonic);
    CHECK(TauParams::from_tau(kPi / 3).branch == Branch::ArctanQuotient);
    CHECK(TauParams::from_tau(kPi / 2).branch == Branch::SpecialLagrangian);
    const auto p = TauParams::from_tau(kPi / 6);
    CHECK(p.a == doctest::Approx(std::cos(kPi / 6) / std::sin(kPi / 6)).epsilon(1e-14));
    CHECK(p.b == doctest::Approx(std::sqrt(p.a * p.a - 1.0)).epsilon(1e-13));
}

TEST_CASE("branch values at known points") {
    // MA: (1/2) sum ln
    auto ma = TauParams::from_tau(0.0);
    CHECK(f_tau(ma, 1.0, 4.0) == doctest::Approx(0.5 * std::log(4.0)).epsilon(1e-15));
    // pi/4: -sqrt(2) sum 1/(1+lambda)
    auto ih = TauParams::from_tau(kPi / 4);
    CHECK(f_tau(ih, 1.0, 1.0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
    // pi/2: sum arctan
    auto sl = TauParams::from_tau(kPi / 2);
    CHECK(f_tau(sl, 1.0, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("df_tau matches finite differences on every branch") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double tau = (kPi / 2) * unit(rng);
        const auto p = TauParams::from_tau(tau);
        const double l = random_admissible(p, rng);
        const double partner = random_admissible(p, rng);
        const double h = 1e-6 * (1.0 + std::abs(l));
        const double fd =
            (f_tau(p, l + h, partner) - f_tau(p, l - h, partner)) / (2.0 * h);
        const double an = df_tau(p, l);
        CHECK(std::abs(fd - an) <= 1e-7 * (1.0 + std::abs(an)));
    }
}

TEST_CASE("df_tau equals the unified rational form") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double tau = (kPi / 2) * unit(rng);
        const auto p = TauParams::from_tau(tau);
        const double l = random_admissible(p, rng);
        const double want =
            1.0 / (std::sin(tau) * l * l + 2.0 * std::cos(tau) * l + std::sin(tau));
        CHECK(df_tau(p, l) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("Q times DF is half the identity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const auto p = TauParams::from_tau(0.02 + 0.96 * (kPi / 2) * unit(rng));
        const Sym2 A = from_eigen(random_admissible(p, rng),
                                  random_admissible(p, rng), kPi * unit(rng));
        const Sym2 Q = q_matrix(p, A);
        const Sym2 D = df_matrix(p, A);
        const Sym2 QD{Q.m11 * D.m11 + Q.m12 * D.m12,
                      Q.m11 * D.m12 + Q.m12 * D.m22,
                      Q.m12 * D.m12 + Q.m22 * D.m22};
        CHECK((QD - 0.5 * Sym2::identity()).max_abs() <= 1e-12);
    }
}

TEST_CASE("partner inversion closes the equation") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const auto p = TauParams::from_tau((kPi / 2) * unit(rng));
        const double l1 = random_admissible(p, rng);
        const double l2 = random_admissible(p, rng);
        const double c0 = f_tau(p, l1, l2);
        const double got = solve_partner_eigenvalue(p, c0, l1);
        CHECK(std::abs(got - l2) <= 1e-9 * (1.0 + std::abs(l2)));
    }
}

TEST_CASE("partner inversion rejects unreachable targets") {
    const auto sl = TauParams::from_tau(kPi / 2);
    // sum arctan cannot exceed pi, so C0 = 4 has no partner
    CHECK_THROWS_AS(solve_partner_eigenvalue(sl, 4.0, 1.0), NoAdmissiblePartner);
    const auto ma = TauParams::from_tau(0.0);
    CHECK_THROWS_AS(solve_partner_eigenvalue(ma, 0.0, -1.0), InadmissibleEigenvalues);
}

TEST_CASE("arctan identity gap is zero on the admissible range") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto p = TauParams::from_tau(3.0 * kPi / 8);
    for (int i = 0; i < 1000; ++i) {
        const double l = -(p.a + p.b) + 0.05 + 6.0 * unit(rng);
        CHECK(std::abs(arctan_identity_gap(p, l)) <= 1e-12);
    }
}

TEST_CASE("eigendecomposition round trip") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Sym2 m{unit(rng), unit(rng), unit(rng)};
        const auto e = eigen_sym2(m);
        CHECK(e.lambda1 <= e.lambda2);
        const Sym2 back = from_eigen(e.lambda1, e.lambda2, e.angle);
        CHECK((m - back).max_abs() <= 1e-12);
    }
    // conjugation shifts the eigenframe angle
    const Sym2 d = Sym2::diag(1.0, 3.0);
    const Sym2 r = conjugate_by_rotation(d, 0.4);
    const auto e = eigen_sym2(r);
    CHECK(e.lambda1 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(e.lambda2 == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(std::abs(std::remainder(e.angle - (kPi / 2 + 0.4), kPi)) <= 1e-12);
}

TEST_CASE("symmetric square root") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.1, 3.0);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    for (int i = 0; i < 100; ++i) {
        const Sym2 m = from_eigen(unit(rng), unit(rng), ang(rng));
        const Sym2 s = sym_sqrt(m);
        CHECK((s.squared() - m).max_abs() <= 1e-12);
    }
}

TEST_CASE("admissibility bounds per branch") {
    CHECK(*admissibility_for(TauParams::from_tau(0.0)).lower_bound ==
          doctest::Approx(0.0));
    const auto lq = TauParams::from_tau(kPi / 6);
    CHECK(*admissibility_for(lq).lower_bound ==
          doctest::Approx(-lq.a + lq.b).epsilon(1e-14));
    CHECK(*admissibility_for(TauParams::from_tau(kPi / 4)).lower_bound ==
          doctest::Approx(-1.0));
    const auto aq = TauParams::from_tau(kPi / 3);
    CHECK(*admissibility_for(aq).lower_bound ==
          doctest::Approx(-(aq.a + aq.b)).epsilon(1e-14));
    const auto sl = admissibility_for(TauParams::from_tau(kPi / 2));
    CHECK(!sl.lower_bound.has_value());
    CHECK(sl.c0_nonzero_required);
    CHECK_THROWS_AS(f_tau(TauParams::from_tau(0.0), -0.5, 1.0),
                    InadmissibleEigenvalues);
}

TEST_CASE("three-term normalization") {
    const auto n = general_normalize({0.0, 1.0, 1.0});
    CHECK(n.shift == doctest::Approx(1.0));
    CHECK(n.product == doctest::Approx(1.0));
    CHECK_THROWS_AS(general_normalize({1.0, 0.0, 0.0}), StructureViolation);
    CHECK_THROWS_AS(general_normalize({1.0, 0.5, 1.0}), StructureViolation);
}
