#include "mgg/legendre.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mgg/solution_impl.hpp"

namespace mgg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kMargin = 1e-6;

double min_eigenvalue(const Sym2& m) {
    return eigen_sym2(m).lambda1;
}

/// Verify lambda_1(D^2 u) > lb + margin on a sampling of the domain.
void check_convexity(const ExteriorSolution& sol, double lb, const char* what) {
    std::vector<double> radii;
    // entire (r_min = 0) solutions are validated on r >= 1: the radial
    // families degenerate toward the puncture while their exterior behavior
    // is what the duality uses
    const double r0 = std::max(sol.r_min(), 1.0);
    if (std::isfinite(sol.r_max()))
        radii = geometric_ladder(r0, sol.r_max(), 8);
    else {
        for (double f : {1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1000.0})
            radii.push_back(r0 * f);
        for (double r : {1.0, 10.0, 100.0, 1000.0})
            if (r > r0 * 1000.0) radii.push_back(r);
    }
    for (double r : radii)
        for (int j = 0; j < 32; ++j) {
            const double th = 2.0 * kPi * j / 32;
            const Sym2 h = sol.hessian({r * std::cos(th), r * std::sin(th)});
            if (!(min_eigenvalue(h) - lb >= kMargin))
                throw ConvexityMargin(std::string(what) +
                                      ": Hessian bound fails at r = " +
                                      std::to_string(r));
        }
}

/// Dual annulus radii from the image of the primal boundary circles under
/// xt = Du + shift * x.
std::pair<double, double> dual_radii(const ExteriorSolution& sol, double shift) {
    auto image = [&](double r, bool want_max) {
        double best = want_max ? 0.0 : std::numeric_limits<double>::infinity();
        for (int j = 0; j < 128; ++j) {
            const double th = 2.0 * kPi * j / 128;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            const double rr = (sol.gradient(x) + shift * x).norm();
            best = want_max ? std::max(best, rr) : std::min(best, rr);
        }
        return best;
    };
    const double rt_min = image(std::max(sol.r_min(), 1.0), true);
    const double rt_max = std::isfinite(sol.r_max())
                              ? image(sol.r_max(), false)
                              : std::numeric_limits<double>::infinity();
    if (!(rt_min < rt_max)) throw Error("dual annulus is empty");
    return {rt_min, rt_max};
}

/// Negation wrapper for the three-term concave branch.
class NegatedSolution : public SolutionImpl {
  public:
    explicit NegatedSolution(ExteriorSolution base)
        : SolutionImpl(base.tau(), -base.c0(), base.r_min(), base.r_max()),
          base_(std::move(base)) {}

    EvalResult eval_impl(const Vec2& x) const override {
        EvalResult e = base_.eval(x);
        return {-e.value, -e.grad, e.hess * -1.0};
    }
    nlohmann::json descriptor() const override {
        return {{"family", "negated"}, {"base", base_.to_json()}};
    }

  private:
    ExteriorSolution base_;
};

class DualSolution : public SolutionImpl {
  public:
    DualSolution(ExteriorSolution primal, MapKind kind, double shift,
                 double scale, TauParams dual_tau, double dual_c0,
                 double rt_min, double rt_max, double primal_lb)
        : SolutionImpl(dual_tau, dual_c0, rt_min, rt_max),
          primal_(std::move(primal)), kind_(kind), shift_(shift),
          scale_(scale), primal_lb_(primal_lb) {}

    EvalResult eval_impl(const Vec2& xt) const override {
        // xt ~ (D^2 u + shift I) x at infinity; without the Hessian limit the
        // shift alone is a serviceable start when it dominates, else xt itself.
        const double g0 = shift_ > 0.1 ? 1.0 / shift_ : 1.0;
        Vec2 guess = xt * g0;
        if (primal_.truth() && primal_.truth()->beta)
            guess = (xt - *primal_.truth()->beta) * g0;
        const Vec2 x = invert_gradient_map(primal_, shift_, xt, guess);
        const EvalResult e = primal_.eval(x);
        if (min_eigenvalue(e.hess) - primal_lb_ < kMargin)
            throw ConvexityMargin("dual evaluation left the convexity region");
        const Sym2 hbar = e.hess + Sym2::identity() * shift_;
        const double ubar = e.value + 0.5 * shift_ * x.dot(x);
        const double conj = x.dot(xt) - ubar;  // convex conjugate of ubar
        if (kind_ == MapKind::ThreeTerm)
            return {conj, x, hbar.inverse()};
        // utilde = |xt|^2/2 - 2b * conjugate
        return {0.5 * xt.dot(xt) - scale_ * conj, xt - scale_ * x,
                Sym2::identity() - scale_ * hbar.inverse()};
    }

    nlohmann::json descriptor() const override {
        return {{"family", "dual"},
                {"map_kind", kind_ == MapKind::ThreeTerm ? "three_term"
                                                         : "legendre_small_tau"},
                {"shift", shift_},
                {"scale", scale_},
                {"base", primal_.to_json()}};
    }

  private:
    ExteriorSolution primal_;
    MapKind kind_;
    double shift_;
    double scale_;
    double primal_lb_;  // eigenvalue floor kept during inversion
};

class RotatedSolution : public SolutionImpl {
  public:
    RotatedSolution(ExteriorSolution base, TauParams p, double c0)
        : SolutionImpl(TauParams::from_tau(kPi / 2), c0, base.r_min(),
                       base.r_max()),
          base_(std::move(base)), a_(p.a), b_(p.b) {}

    EvalResult eval_impl(const Vec2& x) const override {
        const EvalResult e = base_.eval(x);
        return {e.value / b_ + 0.5 * (a_ / b_) * x.dot(x),
                e.grad * (1.0 / b_) + x * (a_ / b_),
                (e.hess + Sym2::identity() * a_) * (1.0 / b_)};
    }
    nlohmann::json descriptor() const override {
        return {{"family", "rotated"}, {"a", a_}, {"b", b_},
                {"base", base_.to_json()}};
    }

  private:
    ExteriorSolution base_;
    double a_;
    double b_;
};

}  // namespace

Vec2 invert_gradient_map(const ExteriorSolution& sol, double shift,
                         const Vec2& xt, const Vec2& guess) {
    auto clamp_domain = [&](Vec2 x) {
        const double r = x.norm();
        const double lo = sol.r_min() * (1.0 + 1e-12);
        if (r < lo) return x * (lo / std::max(r, 1e-300));
        if (std::isfinite(sol.r_max()) && r > sol.r_max())
            return x * (sol.r_max() * (1.0 - 1e-12) / r);
        return x;
    };
    Vec2 x = clamp_domain(guess);
    const double tol = 1e-12 * (1.0 + xt.norm());
    EvalResult e = sol.eval(x);
    Vec2 g = e.grad + shift * x - xt;
    for (int it = 0; it < 80; ++it) {
        if (g.norm() <= tol) return x;
        const Sym2 jac = e.hess + Sym2::identity() * shift;
        const Vec2 step = jac.inverse().apply(g);
        double t = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
            const Vec2 xn = clamp_domain(x - t * step);
            const EvalResult en = sol.eval(xn);
            const Vec2 gn = en.grad + shift * xn - xt;
            if (gn.norm() < g.norm() || t < 1e-12) {
                x = xn;
                e = en;
                g = gn;
                break;
            }
            t *= 0.5;
        }
    }
    if (g.norm() <= 1e3 * tol) return x;
    throw InversionFailure("gradient map inversion stalled");
}

DualPair legendre_dual(const ExteriorSolution& sol, const TauParams& p) {
    if (p.branch != Branch::LogQuotient)
        throw Error("legendre_dual requires the log-quotient branch");
    const double lb = -p.a + p.b;
    check_convexity(sol, lb, "legendre_dual");
    const double shift = p.a + p.b;
    const auto [rt_min, rt_max] = dual_radii(sol, shift);
    const double dual_c0 = p.b * sol.c0() / std::sqrt(p.a * p.a + 1.0);
    auto impl = std::make_shared<DualSolution>(
        sol, MapKind::LegendreSmallTau, shift, 2.0 * p.b,
        TauParams::from_tau(0.0), dual_c0, rt_min, rt_max, lb);
    if (sol.truth() && sol.truth()->A) {
        ExpansionCoeffs t;
        const Sym2 inv = (*sol.truth()->A + Sym2::identity() * shift).inverse();
        t.A = Sym2::identity() - 2.0 * p.b * inv;
        impl->truth_ = t;
    }
    return {sol, ExteriorSolution(impl), shift, 2.0 * p.b,
            MapKind::LegendreSmallTau, false};
}

ExteriorSolution rotate_large_tau(const ExteriorSolution& sol,
                                  const TauParams& p) {
    if (p.branch != Branch::ArctanQuotient)
        throw Error("rotate_large_tau requires the arctan-quotient branch");
    check_convexity(sol, -(p.a + p.b), "rotate_large_tau");
    const double c0_v = p.b * sol.c0() / std::sqrt(p.a * p.a + 1.0) + kPi / 2;
    auto impl = std::make_shared<RotatedSolution>(sol, p, c0_v);
    if (sol.truth()) {
        const auto& pt = *sol.truth();
        ExpansionCoeffs t;
        const double s = std::sin(p.tau);
        if (pt.A) t.A = (*pt.A + Sym2::identity() * p.a) * (1.0 / p.b);
        if (pt.beta) t.beta = *pt.beta * (1.0 / p.b);
        if (pt.d) t.d = *pt.d / p.b;
        // the canonical log arguments differ by the factor b^2 sin(tau)
        if (pt.gamma && pt.d)
            t.gamma = *pt.gamma / p.b + (*pt.d / p.b) * std::log(p.b * p.b * s);
        if (pt.d1) t.d1 = *pt.d1 / (p.b * p.b * std::sqrt(s));
        if (pt.d2) t.d2 = *pt.d2 / (p.b * p.b * std::sqrt(s));
        impl->truth_ = t;
    }
    return ExteriorSolution(impl);
}

DualPair three_term_reduce(const ExteriorSolution& sol, const GeneralCoeffs& g) {
    GeneralCoeffs gg = g;
    if (gg.c2 < 0.0) { gg.c0 = -gg.c0; gg.c1 = -gg.c1; gg.c2 = -gg.c2; }
    const auto norm = general_normalize(gg);  // throws StructureViolation
    double shift = norm.shift;
    ExteriorSolution primal_eff = sol;
    bool negated = false;
    try {
        check_convexity(primal_eff, -shift, "three_term_reduce");
    } catch (const ConvexityMargin&) {
        // -u has negated eigenvalues, so it solves the variant with c1
        // negated: same product, opposite shift.
        shift = -norm.shift;
        primal_eff = ExteriorSolution(std::make_shared<NegatedSolution>(sol));
        check_convexity(primal_eff, -shift, "three_term_reduce (negated)");
        negated = true;
    }
    const auto [rt_min, rt_max] = dual_radii(primal_eff, shift);
    const double dual_c0 = -0.5 * std::log(norm.product);
    auto impl = std::make_shared<DualSolution>(
        primal_eff, MapKind::ThreeTerm, shift, 1.0, TauParams::from_tau(0.0),
        dual_c0, rt_min, rt_max, -shift);
    return {sol, ExteriorSolution(impl), shift, 1.0, MapKind::ThreeTerm,
            negated};
}

}  // namespace mgg
