#include "mgg/solutions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "mgg/solution_impl.hpp"

namespace mgg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Radial solution given closed-form U, U', U'' callables.
class RadialClosedForm final : public SolutionImpl {
  public:
    using Fn = std::function<double(double)>;
    RadialClosedForm(TauParams tau, double c0, Fn U, Fn p, Fn pp, nlohmann::json desc)
        : SolutionImpl(tau, c0, 0.0, kInf),
          U_(std::move(U)), p_(std::move(p)), pp_(std::move(pp)), desc_(std::move(desc)) {}

    EvalResult eval_impl(const Vec2& x) const override {
        const double r = x.norm();
        const Vec2 er = x * (1.0 / r);
        const double p = p_(r), pp = pp_(r);
        EvalResult out;
        out.value = U_(r);
        out.grad = p * er;
        out.hess = pp * outer(er) + (p / r) * (Sym2::identity() - outer(er));
        return out;
    }
    nlohmann::json descriptor() const override { return desc_; }

  private:
    Fn U_, p_, pp_;
    nlohmann::json desc_;
};

/// Closed-form antiderivative of sqrt(k^2 r^2 + c1).
double radial_value(double kappa, double c1, double r) {
    const double p = std::sqrt(kappa * kappa * r * r + c1);
    if (c1 == 0.0) return 0.5 * kappa * r * r;
    return 0.5 * r * p + c1 / (2.0 * kappa) * std::asinh(kappa * r / std::sqrt(c1));
}

/// Constant term of the expansion of radial_value, for kappa = e^{C0}.
double radial_gamma(double kappa, double c1) {
    if (c1 == 0.0) return 0.0;
    return c1 / (4.0 * kappa) + c1 / (2.0 * kappa) * std::log(2.0 * kappa / std::sqrt(c1)) -
           c1 / (4.0 * kappa) * std::log(kappa);
}

std::shared_ptr<SolutionImpl> make_ma_radial(double C0, double c1, nlohmann::json desc) {
    if (c1 < 0.0) throw Error("ma_radial_exact: c1 must be nonnegative");
    const double kappa = std::exp(C0);
    auto impl = std::make_shared<RadialClosedForm>(
        TauParams::from_tau(0.0), C0,
        [kappa, c1](double r) { return radial_value(kappa, c1, r); },
        [kappa, c1](double r) { return std::sqrt(kappa * kappa * r * r + c1); },
        [kappa, c1](double r) { return kappa * kappa * r / std::sqrt(kappa * kappa * r * r + c1); },
        std::move(desc));
    ExpansionCoeffs t;
    t.A = kappa * Sym2::identity();
    t.beta = Vec2{0.0, 0.0};
    t.gamma = radial_gamma(kappa, c1);
    t.d = c1 * std::exp(-C0) / 4.0;
    t.d1 = 0.0;
    t.d2 = 0.0;
    t.Q = kappa * Sym2::identity();
    impl->truth_ = t;
    return impl;
}

class QuadraticSolution final : public SolutionImpl {
  public:
    QuadraticSolution(const TauParams& p, const Sym2& A, const Vec2& beta, double gamma)
        : SolutionImpl(p, 0.0, 0.0, kInf), A_(A), beta_(beta), gamma_(gamma) {
        const auto e = eigen_sym2(A);
        c0_ = f_tau(p, e.lambda1, e.lambda2);  // throws if inadmissible
        ExpansionCoeffs t;
        t.A = A;
        t.beta = beta;
        t.gamma = gamma;
        t.d = 0.0;
        t.d1 = 0.0;
        t.d2 = 0.0;
        t.Q = q_matrix(p, A);
        truth_ = t;
    }

    EvalResult eval_impl(const Vec2& x) const override {
        return {0.5 * A_.quad(x) + beta_.dot(x) + gamma_, A_.apply(x) + beta_, A_};
    }
    nlohmann::json descriptor() const override {
        return {{"family", "quadratic"},
                {"tau", tau_.tau},
                {"A", {A_.m11, A_.m12, A_.m22}},
                {"beta", {beta_.x1, beta_.x2}},
                {"gamma", gamma_}};
    }

  private:
    Sym2 A_;
    Vec2 beta_;
    double gamma_;
};

/// u(x) = base(B x) for a constant matrix B (used with det B = 1).
class LinearMapped final : public SolutionImpl {
  public:
    LinearMapped(ExteriorSolution base, const Sym2& B, nlohmann::json desc)
        : SolutionImpl(base.tau(), base.c0(), 0.0, kInf),
          base_(std::move(base)), B_(B), desc_(std::move(desc)) {
        const auto e = eigen_sym2(B);
        const double lo = std::min(std::abs(e.lambda1), std::abs(e.lambda2));
        const double hi = std::max(std::abs(e.lambda1), std::abs(e.lambda2));
        r_min_ = base_.r_min() / lo;
        if (std::isfinite(base_.r_max())) r_max_ = base_.r_max() / hi;
    }

    EvalResult eval_impl(const Vec2& x) const override {
        const auto e = base_.eval(B_.apply(x));
        EvalResult out;
        out.value = e.value;
        out.grad = B_.apply(e.grad);
        // B H B for symmetric B
        const Sym2& h = e.hess;
        const Sym2& b = B_;
        const double h11 = h.m11 * b.m11 + h.m12 * b.m12;
        const double h12 = h.m11 * b.m12 + h.m12 * b.m22;
        const double h21 = h.m12 * b.m11 + h.m22 * b.m12;
        const double h22 = h.m12 * b.m12 + h.m22 * b.m22;
        out.hess = {b.m11 * h11 + b.m12 * h21, b.m11 * h12 + b.m12 * h22,
                    b.m12 * h12 + b.m22 * h22};
        return out;
    }
    nlohmann::json descriptor() const override { return desc_; }

  private:
    ExteriorSolution base_;
    Sym2 B_;
    nlohmann::json desc_;
};

/// Quintic Hermite coefficients on [0,1] from values and scaled derivatives.
struct Quintic {
    std::array<double, 6> a;

    Quintic(double f0, double d0, double s0, double f1, double d1, double s1, double h) {
        const double D0 = d0 * h, S0 = s0 * h * h, D1 = d1 * h, S1 = s1 * h * h;
        const double A = f1 - f0 - D0 - 0.5 * S0;
        const double B = D1 - D0 - S0;
        const double C = S1 - S0;
        a = {f0, D0, 0.5 * S0,
             10.0 * A - 4.0 * B + 0.5 * C,
             -15.0 * A + 7.0 * B - C,
             6.0 * A - 3.0 * B + 0.5 * C};
    }
    double eval(double t) const {
        return a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * (a[4] + t * a[5]))));
    }
    /// h * integral_0^t of the polynomial.
    double integral(double t, double h) const {
        return h * t *
               (a[0] + t * (a[1] / 2 + t * (a[2] / 3 + t * (a[3] / 4 + t * (a[4] / 5 + t * a[5] / 6)))));
    }
};

class ProfileSolution final : public SolutionImpl {
  public:
    explicit ProfileSolution(RadialProfile prof, nlohmann::json desc)
        : SolutionImpl(prof.tau, prof.C0, prof.r_grid.front(), prof.r_grid.back()),
          prof_(std::move(prof)), desc_(std::move(desc)) {
        const std::size_t n = prof_.r_grid.size();
        ddp_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = prof_.r_grid[i], p = prof_.p[i], pp = prof_.dp[i];
            const double l1 = pp, l2 = p / r;
            // d(lambda1)/dr through the implicit relation f(l1, l2) = C0
            ddp_[i] = -df_tau(tau_, l2) / df_tau(tau_, l1) * (pp * r - p) / (r * r);
        }
    }

    EvalResult eval_impl(const Vec2& x) const override {
        const double r = x.norm();
        const auto& rg = prof_.r_grid;
        auto it = std::upper_bound(rg.begin(), rg.end(), r);
        std::size_t i = (it == rg.begin()) ? 0 : (it - rg.begin() - 1);
        i = std::min(i, rg.size() - 2);
        const double h = rg[i + 1] - rg[i];
        const double t = (r - rg[i]) / h;
        const Quintic qp(prof_.p[i], prof_.dp[i], ddp_[i],
                         prof_.p[i + 1], prof_.dp[i + 1], ddp_[i + 1], h);
        const double p = qp.eval(t);
        const double l2 = p / r;
        const double l1 = solve_partner_eigenvalue(tau_, c0_, l2);
        const Vec2 er = x * (1.0 / r);
        EvalResult out;
        out.value = prof_.U[i] + qp.integral(t, h);
        out.grad = p * er;
        out.hess = l1 * outer(er) + l2 * (Sym2::identity() - outer(er));
        return out;
    }
    nlohmann::json descriptor() const override { return desc_; }

  private:
    RadialProfile prof_;
    std::vector<double> ddp_;
    nlohmann::json desc_;
};

class TransformedSolution final : public SolutionImpl {
  public:
    TransformedSolution(ExteriorSolution base, const AffineFrame& frame)
        : SolutionImpl(base.tau(), base.c0(), 0.0, kInf),
          base_(std::move(base)), frame_(frame) {
        const double shift = frame.x0.norm();
        r_min_ = base_.r_min() + shift;
        if (std::isfinite(base_.r_max())) {
            r_max_ = base_.r_max() - shift;
            if (r_max_ <= r_min_)
                throw DomainViolation("transform: translated domain is empty");
        }
        if (base_.truth()) truth_ = transport(*base_.truth());
    }

    EvalResult eval_impl(const Vec2& x) const override {
        const double ca = std::cos(frame_.rotation_angle), sa = std::sin(frame_.rotation_angle);
        const Vec2 y = x - frame_.x0;
        const Vec2 z{ca * y.x1 + sa * y.x2, -sa * y.x1 + ca * y.x2};  // R^T y
        const auto e = base_.eval(z);
        EvalResult out;
        out.value = e.value + frame_.beta_add.dot(x) + frame_.gamma_add;
        const Vec2 g = e.grad;
        out.grad = Vec2{ca * g.x1 - sa * g.x2, sa * g.x1 + ca * g.x2} + frame_.beta_add;
        out.hess = conjugate_by_rotation(e.hess, frame_.rotation_angle);
        return out;
    }

    nlohmann::json descriptor() const override {
        return {{"family", "transformed"},
                {"base", base_.to_json()},
                {"rotation_angle", frame_.rotation_angle},
                {"x0", {frame_.x0.x1, frame_.x0.x2}},
                {"beta_add", {frame_.beta_add.x1, frame_.beta_add.x2}},
                {"gamma_add", frame_.gamma_add}};
    }

  private:
    ExpansionCoeffs transport(const ExpansionCoeffs& t) const {
        ExpansionCoeffs out;
        const double ang = frame_.rotation_angle;
        const double ca = std::cos(ang), sa = std::sin(ang);
        auto rot = [&](const Vec2& v) {
            return Vec2{ca * v.x1 - sa * v.x2, sa * v.x1 + ca * v.x2};
        };
        if (!t.A) return out;
        const Sym2 A = conjugate_by_rotation(*t.A, ang);
        out.A = A;
        const Sym2 Q = q_matrix(tau_, A);
        out.Q = Q;
        if (t.beta) {
            out.beta = -A.apply(frame_.x0) + rot(*t.beta) + frame_.beta_add;
            if (t.gamma)
                out.gamma = *t.gamma + 0.5 * A.quad(frame_.x0) - rot(*t.beta).dot(frame_.x0) +
                            frame_.gamma_add;
        }
        if (t.d) {
            out.d = *t.d;
            if (t.d1 && t.d2) {
                const Vec2 y0 = sym_sqrt(Q).apply(frame_.x0);
                const Vec2 drot = rot({*t.d1, *t.d2});
                out.d1 = drot.x1 - 2.0 * *t.d * y0.x1;
                out.d2 = drot.x2 - 2.0 * *t.d * y0.x2;
            }
        }
        return out;
    }

    ExteriorSolution base_;
    AffineFrame frame_;
};

class CustomSolution final : public SolutionImpl {
  public:
    CustomSolution(TauParams p, double c0, double r_min, double r_max,
                   std::function<EvalResult(const Vec2&)> fn)
        : SolutionImpl(p, c0, r_min, r_max), fn_(std::move(fn)) {}
    EvalResult eval_impl(const Vec2& x) const override { return fn_(x); }
    nlohmann::json descriptor() const override {
        throw Error("custom solutions are not serializable");
    }

  private:
    std::function<EvalResult(const Vec2&)> fn_;
};

}  // namespace

ExteriorSolution::ExteriorSolution(std::shared_ptr<const SolutionImpl> impl)
    : impl_(std::move(impl)) {}

EvalResult ExteriorSolution::eval(const Vec2& x) const {
    const double r = x.norm();
    if (!(r > 0.0) || r < impl_->r_min_ * (1.0 - 1e-12) || r > impl_->r_max_ * (1.0 + 1e-12))
        throw DomainViolation("evaluation at |x| = " + std::to_string(r) +
                              " outside [" + std::to_string(impl_->r_min_) + ", " +
                              std::to_string(impl_->r_max_) + "]");
    return impl_->eval_impl(x);
}

double ExteriorSolution::r_min() const { return impl_->r_min_; }
double ExteriorSolution::r_max() const { return impl_->r_max_; }
const TauParams& ExteriorSolution::tau() const { return impl_->tau_; }
double ExteriorSolution::c0() const { return impl_->c0_; }
const std::optional<ExpansionCoeffs>& ExteriorSolution::truth() const { return impl_->truth_; }

nlohmann::json ExteriorSolution::to_json() const { return impl_->descriptor(); }

ExteriorSolution ma_radial_exact(double C0, double c1) {
    return ExteriorSolution(make_ma_radial(
        C0, c1, {{"family", "ma_radial_exact"}, {"C0", C0}, {"c1", c1}}));
}

ExteriorSolution ma_radial_prefactor_variant(double C0, double c1) {
    // u = e^{C0} V(e^{C0/2} |x|) with V' = sqrt(s^2 + c1).  Substituting shows
    // this equals the det-consistent family at constant 2*C0 with c1 scaled by
    // e^{3 C0}, so det D^2 u = e^{4 C0}.
    const double kappa = std::exp(C0);
    auto impl = make_ma_radial(2.0 * C0, c1 * kappa * kappa * kappa,
                               {{"family", "ma_radial_prefactor_variant"},
                                {"C0", C0},
                                {"c1", c1}});
    return ExteriorSolution(std::move(impl));
}

ExteriorSolution sl_radial_exact(double c1) {
    if (c1 < 0.0) throw Error("sl_radial_exact: c1 must be nonnegative");
    auto impl = std::make_shared<RadialClosedForm>(
        TauParams::from_tau(kPi / 2), kPi / 2,
        [c1](double r) { return radial_value(1.0, c1, r); },
        [c1](double r) { return std::sqrt(r * r + c1); },
        [c1](double r) { return r / std::sqrt(r * r + c1); },
        nlohmann::json{{"family", "sl_radial_exact"}, {"c1", c1}});
    ExpansionCoeffs t;
    t.A = Sym2::identity();
    t.beta = Vec2{0.0, 0.0};
    t.gamma = radial_gamma(1.0, c1);
    t.d = c1 / 4.0;
    t.d1 = 0.0;
    t.d2 = 0.0;
    t.Q = Sym2::identity();
    impl->truth_ = t;
    return ExteriorSolution(std::move(impl));
}

ExteriorSolution ma_affine(double C0, double c1, const Sym2& B) {
    if (std::abs(B.det() - 1.0) > 1e-10)
        throw Error("ma_affine: B must have unit determinant");
    const auto eb = eigen_sym2(B);
    if (!(eb.lambda1 > 0.0)) throw Error("ma_affine: B must be positive definite");
    auto base = ma_radial_exact(C0, c1);
    auto impl = std::make_shared<LinearMapped>(
        base, B,
        nlohmann::json{{"family", "ma_affine"},
                       {"C0", C0},
                       {"c1", c1},
                       {"B", {B.m11, B.m12, B.m22}}});
    const double kappa = std::exp(C0);
    ExpansionCoeffs t = *base.truth();
    t.A = kappa * B.squared();
    t.Q = t.A;  // tau = 0: canonical Q equals A
    impl->truth_ = t;
    return ExteriorSolution(std::move(impl));
}

ExteriorSolution quadratic_solution(const TauParams& p, const Sym2& A,
                                    const Vec2& beta, double gamma) {
    return ExteriorSolution(std::make_shared<QuadraticSolution>(p, A, beta, gamma));
}

RadialProfile radial_ode_solve(const TauParams& p, double C0, double r0,
                               double p0, double rmax) {
    namespace ode = boost::numeric::odeint;
    if (!(rmax > r0) || !(r0 > 0.0)) throw Error("radial_ode_solve: need 0 < r0 < rmax");
    if (!is_admissible(p, p0 / r0))
        throw AdmissibilityLost("initial tangential eigenvalue inadmissible");
    try {
        solve_partner_eigenvalue(p, C0, p0 / r0);
    } catch (const NoAdmissiblePartner&) {
        throw RangeExceeded("C0 unattainable at r0 for the given p0");
    }

    using State = std::array<double, 2>;  // {p, U}
    auto system = [&](const State& y, State& dy, double r) {
        dy[0] = solve_partner_eigenvalue(p, C0, y[0] / r);
        dy[1] = y[0];
    };

    const double h_ln = 0.01;
    const int n = std::max<int>(64, static_cast<int>(std::ceil(std::log(rmax / r0) / h_ln))) + 1;
    RadialProfile prof{{}, {}, {}, {}, p, C0};
    prof.r_grid.reserve(n);
    for (int i = 0; i < n; ++i)
        prof.r_grid.push_back(r0 * std::pow(rmax / r0, double(i) / (n - 1)));
    prof.r_grid.back() = rmax;

    auto stepper = ode::make_controlled(1e-13, 1e-13,
                                        ode::runge_kutta_dopri5<State>());
    State y{p0, 0.0};
    prof.p.push_back(p0);
    prof.dp.push_back(solve_partner_eigenvalue(p, C0, p0 / r0));
    prof.U.push_back(0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double ra = prof.r_grid[i], rb = prof.r_grid[i + 1];
        try {
            ode::integrate_adaptive(stepper, system, y, ra, rb, (rb - ra) / 8.0);
        } catch (const NoAdmissiblePartner&) {
            throw AdmissibilityLost("trajectory left the admissible region near r = " +
                                    std::to_string(ra));
        }
        prof.p.push_back(y[0]);
        prof.dp.push_back(solve_partner_eigenvalue(p, C0, y[0] / rb));
        prof.U.push_back(y[1]);
    }
    return prof;
}

ExteriorSolution make_solution(RadialProfile profile) {
    nlohmann::json desc{{"family", "radial_ode"},
                        {"tau", profile.tau.tau},
                        {"C0", profile.C0},
                        {"r0", profile.r_grid.front()},
                        {"p0", profile.p.front()},
                        {"rmax", profile.r_grid.back()}};
    auto impl = std::make_shared<ProfileSolution>(std::move(profile), std::move(desc));
    // Isotropic profiles converge to lambda_inf I; record what is known.
    ExpansionCoeffs t;
    t.beta = Vec2{0.0, 0.0};
    t.d1 = 0.0;
    t.d2 = 0.0;
    impl->truth_ = t;
    return ExteriorSolution(std::move(impl));
}

ExteriorSolution transform(const ExteriorSolution& sol, const AffineFrame& frame) {
    return ExteriorSolution(std::make_shared<TransformedSolution>(sol, frame));
}

ExteriorSolution custom_solution(const TauParams& p, double C0, double r_min,
                                 double r_max,
                                 std::function<EvalResult(const Vec2&)> fn) {
    return ExteriorSolution(
        std::make_shared<CustomSolution>(p, C0, r_min, r_max, std::move(fn)));
}

ExteriorSolution ExteriorSolution::from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "ma_radial_exact")
        return ma_radial_exact(j.at("C0").get<double>(), j.at("c1").get<double>());
    if (family == "ma_radial_prefactor_variant")
        return ma_radial_prefactor_variant(j.at("C0").get<double>(), j.at("c1").get<double>());
    if (family == "sl_radial_exact") return sl_radial_exact(j.at("c1").get<double>());
    if (family == "ma_affine") {
        const auto b = j.at("B");
        return ma_affine(j.at("C0").get<double>(), j.at("c1").get<double>(),
                         Sym2{b.at(0), b.at(1), b.at(2)});
    }
    if (family == "quadratic") {
        const auto a = j.at("A");
        const auto be = j.at("beta");
        return quadratic_solution(TauParams::from_tau(j.at("tau").get<double>()),
                                  Sym2{a.at(0), a.at(1), a.at(2)},
                                  Vec2{be.at(0), be.at(1)}, j.at("gamma").get<double>());
    }
    if (family == "radial_ode") {
        auto prof = radial_ode_solve(TauParams::from_tau(j.at("tau").get<double>()),
                                     j.at("C0").get<double>(), j.at("r0").get<double>(),
                                     j.at("p0").get<double>(), j.at("rmax").get<double>());
        return make_solution(std::move(prof));
    }
    if (family == "transformed") {
        auto base = from_json(j.at("base"));
        AffineFrame f;
        f.rotation_angle = j.at("rotation_angle").get<double>();
        f.x0 = {j.at("x0").at(0), j.at("x0").at(1)};
        f.beta_add = {j.at("beta_add").at(0), j.at("beta_add").at(1)};
        f.gamma_add = j.at("gamma_add").get<double>();
        return transform(base, f);
    }
    throw ConfigInvalid("unknown solution family: " + family);
}

RingSampleSet sample_rings(const ExteriorSolution& sol,
                           const std::vector<double>& radii, int n_theta) {
    if (n_theta < 8 || n_theta % 2 != 0)
        throw Error("sample_rings: n_theta must be even and >= 8");
    for (double r : radii)
        if (r < sol.r_min() || r > sol.r_max())
            throw DomainViolation("sample_rings: radius outside solution domain");

    const auto thetas = uniform_angles(n_theta);
    RingSampleSet out;
    auto init = [&](RingSamples& rs, RingKind kind, int ncomp) {
        rs.radii = radii;
        rs.thetas = thetas;
        rs.kind = kind;
        rs.comps.assign(ncomp, std::vector<std::vector<double>>(
                                   radii.size(), std::vector<double>(n_theta)));
    };
    init(out.value, RingKind::scalar, 1);
    init(out.gradient, RingKind::gradient, 2);
    init(out.hessian, RingKind::hessian, 3);

    for (std::size_t i = 0; i < radii.size(); ++i) {
        for (int j = 0; j < n_theta; ++j) {
            const Vec2 x{radii[i] * std::cos(thetas[j]), radii[i] * std::sin(thetas[j])};
            const auto e = sol.eval(x);
            out.value.comps[0][i][j] = e.value;
            out.gradient.comps[0][i][j] = e.grad.x1;
            out.gradient.comps[1][i][j] = e.grad.x2;
            out.hessian.comps[0][i][j] = e.hess.m11;
            out.hessian.comps[1][i][j] = e.hess.m12;
            out.hessian.comps[2][i][j] = e.hess.m22;
        }
    }
    return out;
}

}  // namespace mgg
