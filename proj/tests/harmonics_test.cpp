#include "mgg/harmonics.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"

using namespace mgg;

namespace {
constexpr double kPi = std::numbers::pi;

RingSamples scalar_rings(const std::vector<double>& radii, int n_theta,
                         double (*f)(double, double)) {
    RingSamples rs;
    rs.radii = radii;
    rs.thetas = uniform_angles(n_theta);
    rs.kind = RingKind::scalar;
    rs.comps.assign(1, std::vector<std::vector<double>>(
                           radii.size(), std::vector<double>(n_theta)));
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (int j = 0; j < n_theta; ++j)
            rs.comps[0][i][j] = f(radii[i], rs.thetas[j]);
    return rs;
}

double max_rel_err(const std::vector<double>& got, const std::vector<double>& radii,
                   double (*expect)(double)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double e = expect(radii[i]);
        worst = std::max(worst, std::abs(got[i] - e) / std::abs(e));
    }
    return worst;
}
}  // namespace

TEST_CASE("mode projection is exact for band-limited samples") {
    auto rings = scalar_rings(geometric_ladder(2.0, 20.0, 6), 32,
                              [](double r, double th) {
                                  return r + 2.0 * std::cos(3.0 * th) -
                                         0.5 * std::sin(7.0 * th);
                              });
    const auto modes = project_modes(rings, 8);
    for (const auto& m : modes) {
        for (std::size_t i = 0; i < rings.radii.size(); ++i) {
            double expect = 0.0;
            if (m.k == 0) expect = rings.radii[i] * std::sqrt(2.0 * kPi);
            if (m.k == 3 && m.m == 1) expect = 2.0 * std::sqrt(kPi);
            if (m.k == 7 && m.m == 2) expect = -0.5 * std::sqrt(kPi);
            CHECK(m.coeffs[i] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
        }
    }
    CHECK_THROWS_AS(project_modes(rings, 16), Aliasing);
}

TEST_CASE("power-log tail integrals match closed forms") {
    // integral_r^inf t^-3 dt = r^-2/2
    CHECK(powerlog_tail_integral(-3.0, 0, 2.0) == doctest::Approx(0.125).epsilon(1e-14));
    // integral_r^inf t^-2 ln t dt = (ln r + 1)/r
    CHECK(powerlog_tail_integral(-2.0, 1, 3.0) ==
          doctest::Approx((std::log(3.0) + 1.0) / 3.0).epsilon(1e-14));
    // integral_r^inf t^-3 (ln t)^2 dt = ((ln r)^2 + ln r + 1/2) / (2 r^2)
    const double L = std::log(5.0);
    CHECK(powerlog_tail_integral(-3.0, 2, 5.0) ==
          doctest::Approx((L * L + L + 0.5) / 50.0).epsilon(1e-14));
}

TEST_CASE("cumulative outer integral on smooth decaying data") {
    const auto radii = geometric_ladder(2.0, 2e4, 200);
    std::vector<double> f(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) f[i] = std::pow(radii[i], -3.0);
    const auto I = cumulative_outer_integral(radii, f);
    // against integral_r^R t^-3 dt; the ladder truncates at R = 2e4
    for (std::size_t i : {std::size_t{0}, radii.size() / 2}) {
        const double expect = 0.5 * (std::pow(radii[i], -2.0) - std::pow(2e4, -2.0));
        CHECK(I[i] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("mode k = 1 solver against the closed form") {
    // a'' + a'/r - a/r^2 = r^-4 has decaying solution a = 1/(3 r^2)
    const auto radii = geometric_ladder(2.0, 2000.0, 160);
    ModeSeries b{1, 1, {}};
    for (double r : radii) b.coeffs.push_back(std::pow(r, -4.0));
    const auto a = solve_modek(1, b, radii, {4.0, 0.0});
    CHECK(max_rel_err(a.coeffs, radii,
                      [](double r) { return 1.0 / (3.0 * r * r); }) < 1e-8);
}

TEST_CASE("mode k = 2 resonance-free closed form") {
    // a'' + a'/r - 4 a/r^2 = r^-6 has decaying solution a = r^-4/12
    const auto radii = geometric_ladder(2.0, 2000.0, 160);
    ModeSeries b{2, 1, {}};
    for (double r : radii) b.coeffs.push_back(std::pow(r, -6.0));
    const auto a = solve_modek(2, b, radii, {6.0, 0.0});
    CHECK(max_rel_err(a.coeffs, radii,
                      [](double r) { return std::pow(r, -4.0) / 12.0; }) < 1e-8);
}

TEST_CASE("mode k = 0 solver against the closed form") {
    // a'' + a'/r = r^-4 has decaying solution a = 1/(4 r^2)
    const auto radii = geometric_ladder(2.0, 2000.0, 160);
    ModeSeries b{0, 1, {}};
    for (double r : radii) b.coeffs.push_back(std::pow(r, -4.0));
    const auto a = solve_mode0(b, radii, {4.0, 0.0});
    CHECK(max_rel_err(a.coeffs, radii,
                      [](double r) { return 1.0 / (4.0 * r * r); }) < 1e-8);
}

TEST_CASE("tail divergence is rejected") {
    const auto radii = geometric_ladder(2.0, 200.0, 40);
    ModeSeries b{0, 1, std::vector<double>(radii.size(), 1.0)};
    CHECK_THROWS_AS(solve_mode0(b, radii, {1.5, 0.0}), TailDivergence);
}

TEST_CASE("poisson solve certifies the decay rate") {
    // g = r^-4 (1 + cos theta): v decays like r^-2, inside the r^{2-k1} ln r
    // envelope for k1 = 4, k2 = 0
    auto g = scalar_rings(geometric_ladder(2.0, 2000.0, 160), 64,
                          [](double r, double th) {
                              return std::pow(r, -4.0) * (1.0 + std::cos(th));
                          });
    const auto res = poisson_solve(g, 4.0, 0.0, 8);
    CHECK(res.cert.slope_estimate < -1.8);
    CHECK(res.cert.sup_ratio < 10.0);
    // check the assembled field against the two closed-form modes
    for (std::size_t i = 0; i < g.radii.size(); ++i) {
        const double r = g.radii[i];
        for (std::size_t j = 0; j < g.thetas.size(); ++j) {
            const double expect = 1.0 / (4.0 * r * r) +
                                  std::cos(g.thetas[j]) / (3.0 * r * r);
            CHECK(res.v.comps[0][i][j] ==
                  doctest::Approx(expect).epsilon(5e-7).scale(1e-6));
        }
    }
}

TEST_CASE("decay slope regression recovers pure powers") {
    std::vector<double> radii = geometric_ladder(10.0, 1e4, 20);
    std::vector<double> sups;
    for (double r : radii) sups.push_back(3.0 * std::pow(r, -2.0));
    const auto fit = decay_slope(radii, sups);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fit.ci < 1e-8);

    std::vector<double> suplog;
    for (double r : radii) suplog.push_back(std::pow(r, -2.0) * std::log(r));
    const auto fit2 = decay_slope(radii, suplog, true);
    CHECK(fit2.slope == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(fit2.log_exponent == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(decay_slope({10.0, 20.0, 30.0}, {1.0, 0.5, 0.3}),
                    InsufficientRings);
}

TEST_CASE("ring CSV round trip is exact") {
    auto rings = scalar_rings(geometric_ladder(1.0, 97.0, 5), 8,
                              [](double r, double th) {
                                  return std::sin(r) * std::exp(th) / 7.0;
                              });
    const auto back = RingSamples::from_csv(rings.to_csv());
    REQUIRE(back.radii.size() == rings.radii.size());
    for (std::size_t i = 0; i < rings.radii.size(); ++i) {
        CHECK(back.radii[i] == rings.radii[i]);
        for (std::size_t j = 0; j < rings.thetas.size(); ++j)
            CHECK(back.comps[0][i][j] == rings.comps[0][i][j]);
    }
}
