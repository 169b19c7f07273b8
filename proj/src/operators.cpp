#include "mgg/operators.hpp"

#include <cmath>
#include <numbers>

namespace mgg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kBranchTol = 1e-12;

[[noreturn]] void inadmissible(const TauParams& p, double lambda) {
    throw InadmissibleEigenvalues("eigenvalue " + std::to_string(lambda) +
                                  " inadmissible for branch " + branch_name(p.branch));
}

void check(const TauParams& p, double lambda) {
    if (!is_admissible(p, lambda)) inadmissible(p, lambda);
}
}  // namespace

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::MA: return "MA";
        case Branch::LogQuotient: return "LogQuotient";
        case Branch::InverseHarmonic: return "InverseHarmonic";
        case Branch::ArctanQuotient: return "ArctanQuotient";
        case Branch::SpecialLagrangian: return "SpecialLagrangian";
    }
    return "?";
}

TauParams TauParams::from_tau(double tau) {
    if (!(tau >= 0.0 && tau <= kPi / 2 + kBranchTol))
        throw Error("tau outside [0, pi/2]: " + std::to_string(tau));
    TauParams p{};
    p.tau = tau;
    if (tau == 0.0) {
        p.a = std::numeric_limits<double>::infinity();
        p.b = std::numeric_limits<double>::infinity();
        p.branch = Branch::MA;
        return p;
    }
    p.a = 1.0 / std::tan(tau);
    p.b = std::sqrt(std::abs(p.a * p.a - 1.0));
    if (std::abs(tau - kPi / 4) < kBranchTol) {
        p.a = 1.0;
        p.b = 0.0;
        p.branch = Branch::InverseHarmonic;
    } else if (std::abs(tau - kPi / 2) < kBranchTol) {
        p.a = 0.0;
        p.b = 1.0;
        p.branch = Branch::SpecialLagrangian;
    } else if (tau < kPi / 4) {
        p.branch = Branch::LogQuotient;
    } else {
        p.branch = Branch::ArctanQuotient;
    }
    return p;
}

Admissibility admissibility_for(const TauParams& p) {
    switch (p.branch) {
        case Branch::MA: return {0.0, false};
        case Branch::LogQuotient: return {-p.a + p.b, false};
        case Branch::InverseHarmonic: return {-1.0, false};
        case Branch::ArctanQuotient: return {-(p.a + p.b), false};
        case Branch::SpecialLagrangian: return {std::nullopt, true};
    }
    return {};
}

bool is_admissible(const TauParams& p, double lambda) {
    if (!std::isfinite(lambda)) return false;
    const auto adm = admissibility_for(p);
    if (adm.lower_bound) return lambda > *adm.lower_bound;
    return true;
}

EigenSym2 eigen_sym2(const Sym2& m) {
    const double half_diff = 0.5 * (m.m11 - m.m22);
    const double mean = 0.5 * (m.m11 + m.m22);
    const double disc = std::hypot(half_diff, m.m12);
    EigenSym2 e{};
    e.lambda1 = mean - disc;
    e.lambda2 = mean + disc;
    e.angle = (disc == 0.0) ? 0.0 : 0.5 * std::atan2(2.0 * m.m12, m.m11 - m.m22);
    return e;
}

Sym2 from_eigen(double lambda1, double lambda2, double angle) {
    const Vec2 v{std::cos(angle), std::sin(angle)};   // lambda2 direction
    const Vec2 w{-std::sin(angle), std::cos(angle)};  // lambda1 direction
    return lambda2 * outer(v) + lambda1 * outer(w);
}

Sym2 conjugate_by_rotation(const Sym2& m, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    // R M R^T with R = [[c,-s],[s,c]]
    const double a = m.m11, b = m.m12, d = m.m22;
    return {c * c * a - 2 * c * s * b + s * s * d,
            c * s * (a - d) + (c * c - s * s) * b,
            s * s * a + 2 * c * s * b + c * c * d};
}

Sym2 sym_sqrt(const Sym2& m) {
    const auto e = eigen_sym2(m);
    if (!(e.lambda1 > 0.0)) throw Error("sym_sqrt of a non-positive matrix");
    return from_eigen(std::sqrt(e.lambda1), std::sqrt(e.lambda2), e.angle);
}

double f_tau(const TauParams& p, double lambda1, double lambda2) {
    check(p, lambda1);
    check(p, lambda2);
    switch (p.branch) {
        case Branch::MA:
            return 0.5 * (std::log(lambda1) + std::log(lambda2));
        case Branch::LogQuotient: {
            const double c = std::sqrt(p.a * p.a + 1.0) / (2.0 * p.b);
            return c * (std::log((lambda1 + p.a - p.b) / (lambda1 + p.a + p.b)) +
                        std::log((lambda2 + p.a - p.b) / (lambda2 + p.a + p.b)));
        }
        case Branch::InverseHarmonic:
            return -std::sqrt(2.0) * (1.0 / (1.0 + lambda1) + 1.0 / (1.0 + lambda2));
        case Branch::ArctanQuotient: {
            const double c = std::sqrt(p.a * p.a + 1.0) / p.b;
            return c * (std::atan((lambda1 + p.a - p.b) / (lambda1 + p.a + p.b)) +
                        std::atan((lambda2 + p.a - p.b) / (lambda2 + p.a + p.b)));
        }
        case Branch::SpecialLagrangian:
            return std::atan(lambda1) + std::atan(lambda2);
    }
    return 0.0;
}

double df_tau(const TauParams& p, double lambda) {
    check(p, lambda);
    const double s = std::sin(p.tau), c = std::cos(p.tau);
    return 1.0 / (s * lambda * lambda + 2.0 * c * lambda + s);
}

Sym2 df_matrix(const TauParams& p, const Sym2& a) {
    const auto e = eigen_sym2(a);
    return from_eigen(df_tau(p, e.lambda1), df_tau(p, e.lambda2), e.angle);
}

Sym2 q_matrix(const TauParams& p, const Sym2& a) {
    const auto e = eigen_sym2(a);
    check(p, e.lambda1);
    check(p, e.lambda2);
    const double s = std::sin(p.tau), c = std::cos(p.tau);
    return 0.5 * (s * a.squared() + 2.0 * c * a + s * Sym2::identity());
}

double solve_partner_eigenvalue(const TauParams& p, double c0, double lambda_known) {
    check(p, lambda_known);
    switch (p.branch) {
        case Branch::MA: {
            // 0.5 (ln lk + ln l) = c0
            return std::exp(2.0 * c0) / lambda_known;
        }
        case Branch::LogQuotient: {
            const double t = 2.0 * p.b * c0 / std::sqrt(p.a * p.a + 1.0) -
                             std::log((lambda_known + p.a - p.b) / (lambda_known + p.a + p.b));
            const double q = std::exp(t);
            if (!(q > 0.0 && q < 1.0))
                throw NoAdmissiblePartner("target outside attainable range (LogQuotient)");
            return (q * (p.a + p.b) - (p.a - p.b)) / (1.0 - q);
        }
        case Branch::InverseHarmonic: {
            const double s = -c0 / std::sqrt(2.0) - 1.0 / (1.0 + lambda_known);
            if (!(s > 0.0))
                throw NoAdmissiblePartner("target outside attainable range (InverseHarmonic)");
            return 1.0 / s - 1.0;
        }
        case Branch::ArctanQuotient: {
            const double t = p.b * c0 / std::sqrt(p.a * p.a + 1.0) -
                             std::atan((lambda_known + p.a - p.b) / (lambda_known + p.a + p.b));
            // attainable quotient range for lambda > -(a+b) is (-pi/2, pi/4)
            if (!(t > -kPi / 2 && t < kPi / 4))
                throw NoAdmissiblePartner("target outside attainable range (ArctanQuotient)");
            const double q = std::tan(t);
            return (q * (p.a + p.b) - (p.a - p.b)) / (1.0 - q);
        }
        case Branch::SpecialLagrangian: {
            const double t = c0 - std::atan(lambda_known);
            if (!(t > -kPi / 2 && t < kPi / 2))
                throw NoAdmissiblePartner("target outside attainable range (SpecialLagrangian)");
            return std::tan(t);
        }
    }
    return 0.0;
}

double arctan_identity_gap(const TauParams& p, double lambda) {
    if (p.branch != Branch::ArctanQuotient)
        throw Error("arctan_identity_gap requires the ArctanQuotient branch");
    check(p, lambda);
    // per eigenvalue the offset is pi/4; the pi/2 form is the two-term sum
    const double lhs = std::atan((lambda + p.a - p.b) / (lambda + p.a + p.b));
    const double rhs = std::atan((lambda + p.a) / p.b) - kPi / 4;
    return lhs - rhs;
}

GeneralNormalized general_normalize(const GeneralCoeffs& g) {
    if (g.c2 == 0.0) throw StructureViolation("c2 = 0");
    if (!(g.c0 * g.c2 < g.c1 * g.c1))
        throw StructureViolation("c0*c2 >= c1^2");
    return {g.c1 / g.c2, (g.c1 * g.c1 - g.c0 * g.c2) / (g.c2 * g.c2)};
}

}  // namespace mgg
