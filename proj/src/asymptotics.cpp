#include "mgg/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mgg {

namespace {
constexpr double kPi = std::numbers::pi;

/// Least squares for up to 4 basis columns via normal equations.
std::array<double, 4> least_squares(const std::vector<std::array<double, 4>>& X,
                                    const std::vector<double>& y, int m) {
    double ata[4][5] = {};
    for (std::size_t i = 0; i < X.size(); ++i)
        for (int a = 0; a < m; ++a) {
            ata[a][4] += X[i][a] * y[i];
            for (int b = 0; b < m; ++b) ata[a][b] += X[i][a] * X[i][b];
        }
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(ata[r][c]) > std::abs(ata[piv][c])) piv = r;
        std::swap(ata[c], ata[piv]);
        for (int r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = ata[r][c] / ata[c][c];
            for (int j = c; j <= 4; ++j) ata[r][j] -= f * ata[c][j];
        }
    }
    std::array<double, 4> out{};
    for (int a = 0; a < m; ++a) out[a] = ata[a][4] / ata[a][a];
    return out;
}

Sym2 ring_mean_hessian(const ExteriorSolution& sol, double r, int n_theta) {
    Sym2 acc;
    for (int j = 0; j < n_theta; ++j) {
        const double th = 2.0 * kPi * j / n_theta;
        acc = acc + sol.hessian({r * std::cos(th), r * std::sin(th)});
    }
    return acc * (1.0 / n_theta);
}

/// Constant term of the [1, r^{-2}, r^{-3}] model through three samples.
double tail_extrapolate3(const std::array<double, 3>& r,
                         const std::array<double, 3>& v) {
    std::vector<std::array<double, 4>> X(3);
    std::vector<double> y(3);
    for (int i = 0; i < 3; ++i) {
        X[i] = {1.0, 1.0 / (r[i] * r[i]), 1.0 / (r[i] * r[i] * r[i]), 0.0};
        y[i] = v[i];
    }
    return least_squares(X, y, 3)[0];
}

Sym2 tail_extrapolate3_sym(const std::vector<double>& radii,
                           const std::vector<Sym2>& means, std::size_t last) {
    const std::array<double, 3> rs{radii[last - 2], radii[last - 1], radii[last]};
    auto comp = [&](double Sym2::* f) {
        return tail_extrapolate3(rs, {means[last - 2].*f, means[last - 1].*f,
                                      means[last].*f});
    };
    return {comp(&Sym2::m11), comp(&Sym2::m12), comp(&Sym2::m22)};
}

struct QFrame {
    Sym2 Q;
    Sym2 Qs;   // Q^{1/2}
    Sym2 Qsi;  // Q^{-1/2}
    double sig_min, sig_max;  // singular values of Q^{-1/2}
};

QFrame q_frame(const TauParams& p, const Sym2& A) {
    QFrame f;
    f.Q = q_matrix(p, A);
    if (!(f.Q.det() > 0.0 && f.Q.trace() > 0.0))
        throw NotConverging("canonical Q is not positive definite");
    f.Qs = sym_sqrt(f.Q);
    f.Qsi = f.Qs.inverse();
    const auto e = eigen_sym2(f.Qsi);
    f.sig_min = e.lambda1;
    f.sig_max = e.lambda2;
    return f;
}

/// True when the whole Q-circle of level s lies inside the solution domain.
bool level_in_domain(const ExteriorSolution& sol, const QFrame& f, double s) {
    return s * f.sig_min >= sol.r_min() * (1.0 + 1e-12) &&
           (!std::isfinite(sol.r_max()) || s * f.sig_max <= sol.r_max());
}

struct FluxTerms {
    double grad_flux = 0.0;     // oint (w1, w2) . nu ds, w = Du + shift x
    double hess_flux = 0.0;     // oint w1 (w22, -w12) . nu ds
};

FluxTerms flux_terms(const ExteriorSolution& sol, double r0, int n,
                     double shift) {
    FluxTerms t;
    const double ds = 2.0 * kPi * r0 / n;
    for (int j = 0; j < n; ++j) {
        const double th = 2.0 * kPi * j / n;
        const Vec2 nu{std::cos(th), std::sin(th)};
        const Vec2 x = r0 * nu;
        const EvalResult e = sol.eval(x);
        const double w1 = e.grad.x1 + shift * x.x1;
        const double w2 = e.grad.x2 + shift * x.x2;
        const double w22 = e.hess.m22 + shift;
        const double w12 = e.hess.m12;
        t.grad_flux += (w1 * nu.x1 + w2 * nu.x2) * ds;
        t.hess_flux += w1 * (w22 * nu.x1 - w12 * nu.x2) * ds;
    }
    return t;
}

double flux_once(const ExteriorSolution& sol, const TauParams& p, double c0,
                 double r0, int n, FluxFormula formula, const GeneralCoeffs* g) {
    const double area = kPi * r0 * r0;
    switch (formula) {
        case FluxFormula::MA: {
            const auto t = flux_terms(sol, r0, n, 0.0);
            return (t.hess_flux - std::exp(2.0 * c0) * area) /
                   (4.0 * kPi * std::exp(c0));
        }
        case FluxFormula::SmallTau:
        case FluxFormula::SmallTau_printed: {
            const double w = std::exp(p.b * c0 / std::sqrt(p.a * p.a + 1.0));
            const auto tm = flux_terms(sol, r0, n, p.a - p.b);
            const auto tp = flux_terms(sol, r0, n, p.a + p.b);
            const double printed = tm.hess_flux / (8.0 * kPi * w) -
                                   w * tp.hess_flux / (8.0 * kPi);
            // the printed form evaluates to b*d (the cross-term constant in
            // its derivation drops a factor b)
            return formula == FluxFormula::SmallTau_printed ? printed
                                                            : printed / p.b;
        }
        case FluxFormula::QuarterPi_paper: {
            // printed: (u1 + 1) weight and +1 gradient offsets
            const double ds = 2.0 * kPi * r0 / n;
            double tot = 0.0;
            for (int j = 0; j < n; ++j) {
                const double th = 2.0 * kPi * j / n;
                const Vec2 nu{std::cos(th), std::sin(th)};
                const EvalResult e = sol.eval(r0 * nu);
                tot += (-std::sqrt(2.0) * c0 / (8.0 * kPi) * (e.grad.x1 + 1.0) *
                            ((e.hess.m22 + 1.0) * nu.x1 - e.hess.m12 * nu.x2) +
                        ((e.grad.x1 + 1.0) * nu.x1 + (e.grad.x2 + 1.0) * nu.x2) /
                            (4.0 * kPi)) *
                       ds;
            }
            return area / (2.0 * kPi) + tot;
        }
        case FluxFormula::QuarterPi_derivation: {
            const double cc = std::sqrt(2.0) / 2.0 * c0;
            const auto t = flux_terms(sol, r0, n, 1.0);
            const auto t0 = flux_terms(sol, r0, n, 0.0);
            return -area / (2.0 * kPi) - t0.grad_flux / (4.0 * kPi) -
                   cc * t.hess_flux / (4.0 * kPi);
        }
        case FluxFormula::LargeTau:
        case FluxFormula::LargeTau_printed: {
            const double th0 = p.b * c0 / std::sqrt(p.a * p.a + 1.0);
            const auto t = flux_terms(sol, r0, n, p.a);
            if (formula == FluxFormula::LargeTau_printed)
                return p.b / (4.0 * kPi) *
                           (std::cos(th0) * t.grad_flux +
                            std::sin(th0) * t.hess_flux) -
                       p.b / (4.0 * kPi) * std::sin(th0) * area;
            return -std::sin(th0) / (4.0 * kPi) * t.grad_flux +
                   std::cos(th0) / (4.0 * kPi * p.b) * t.hess_flux -
                   p.b * std::cos(th0) / (4.0 * kPi) * area;
        }
        case FluxFormula::SL: {
            const auto t = flux_terms(sol, r0, n, 0.0);
            return (std::cos(c0) * t.grad_flux + std::sin(c0) * t.hess_flux -
                    std::sin(c0) * area) /
                   (4.0 * kPi);
        }
        case FluxFormula::General: {
            if (!g) throw Error("General flux formula needs the coefficients");
            const auto norm = general_normalize(*g);
            const auto t = flux_terms(sol, r0, n, norm.shift);
            const double root = std::sqrt(norm.product);
            return (t.hess_flux - norm.product * area) / (4.0 * kPi * root);
        }
    }
    throw Error("unknown flux formula");
}

}  // namespace

const char* flux_formula_name(FluxFormula f) {
    switch (f) {
        case FluxFormula::MA: return "MA";
        case FluxFormula::SmallTau: return "SmallTau";
        case FluxFormula::SmallTau_printed: return "SmallTau_printed";
        case FluxFormula::QuarterPi_paper: return "QuarterPi_paper";
        case FluxFormula::QuarterPi_derivation: return "QuarterPi_derivation";
        case FluxFormula::LargeTau: return "LargeTau";
        case FluxFormula::LargeTau_printed: return "LargeTau_printed";
        case FluxFormula::SL: return "SL";
        case FluxFormula::General: return "General";
    }
    return "?";
}

FluxFormula canonical_flux_formula(Branch b) {
    switch (b) {
        case Branch::MA: return FluxFormula::MA;
        case Branch::LogQuotient: return FluxFormula::SmallTau;
        case Branch::InverseHarmonic: return FluxFormula::QuarterPi_derivation;
        case Branch::ArctanQuotient: return FluxFormula::LargeTau;
        case Branch::SpecialLagrangian: return FluxFormula::SL;
    }
    return FluxFormula::MA;
}

Sym2 fit_A(const ExteriorSolution& sol, const std::vector<double>& radii,
           int n_theta, double* err_out) {
    const std::size_t n = radii.size();
    if (n < 4) throw InsufficientRings("fit_A needs at least 4 rings");
    if (!(radii.back() >= 100.0 * radii.front()))
        throw InsufficientRings("fit_A ladder must span two decades");
    std::vector<Sym2> means(n);
    for (std::size_t i = 0; i < n; ++i)
        means[i] = ring_mean_hessian(sol, radii[i], n_theta);
    const Sym2 a0 = tail_extrapolate3_sym(radii, means, n - 1);
    const Sym2 a1 = tail_extrapolate3_sym(radii, means, n - 2);
    if (err_out) *err_out = (a0 - a1).max_abs();

    // the ring means must approach a0 at the r^{-2} rate
    const std::size_t mid = n / 2;
    const double d_mid = (means[mid] - a0).max_abs();
    const double d_last = (means[n - 1] - a0).max_abs();
    const double floor = 1e-12 * (1.0 + a0.max_abs());
    if (d_mid > 50.0 * floor && d_last > 50.0 * floor) {
        const double expected =
            d_mid * (radii[mid] / radii[n - 1]) * (radii[mid] / radii[n - 1]);
        if (d_last > 10.0 * expected)
            throw NotConverging("ring-averaged Hessian not converging at r^-2");
    }

    // one Newton projection onto F_tau(lambda(A)) = C0
    const auto e = eigen_sym2(a0);
    const TauParams& p = sol.tau();
    const double rho = f_tau(p, e.lambda1, e.lambda2) - sol.c0();
    const double g1 = df_tau(p, e.lambda1), g2 = df_tau(p, e.lambda2);
    const double den = g1 * g1 + g2 * g2;
    return from_eigen(e.lambda1 - rho * g1 / den, e.lambda2 - rho * g2 / den,
                      e.angle);
}

void fit_beta_gamma_d(const ExteriorSolution& sol, const Sym2& A,
                      const std::vector<double>& radii, int n_theta,
                      ExpansionCoeffs& io) {
    const auto f = q_frame(sol.tau(), A);
    std::vector<double> levels;
    std::vector<Vec2> gmean;
    std::vector<double> vmean;
    for (double s : radii) {
        if (!level_in_domain(sol, f, s)) continue;
        Vec2 gm{};
        double vm = 0.0;
        for (int j = 0; j < n_theta; ++j) {
            const double ph = 2.0 * kPi * j / n_theta;
            const Vec2 x = f.Qsi.apply({s * std::cos(ph), s * std::sin(ph)});
            const EvalResult e = sol.eval(x);
            gm = gm + (e.grad - A.apply(x));
            vm += e.value - 0.5 * A.quad(x);
        }
        levels.push_back(s);
        gmean.push_back(gm * (1.0 / n_theta));
        vmean.push_back(vm / n_theta);
    }
    const std::size_t n = levels.size();
    if (n < 8) throw InsufficientRings("too few usable Q-circle levels");

    auto beta_at = [&](std::size_t last) {
        const std::array<double, 3> rs{levels[last - 2], levels[last - 1],
                                       levels[last]};
        return Vec2{
            tail_extrapolate3(rs, {gmean[last - 2].x1, gmean[last - 1].x1,
                                   gmean[last].x1}),
            tail_extrapolate3(rs, {gmean[last - 2].x2, gmean[last - 1].x2,
                                   gmean[last].x2})};
    };
    const Vec2 beta = beta_at(n - 1);
    const Vec2 beta_prev = beta_at(n - 2);
    io.beta = beta;
    io.errors["beta"] = std::max(std::abs(beta.x1 - beta_prev.x1),
                                 std::abs(beta.x2 - beta_prev.x2));

    // the circle average of beta.x vanishes, so vmean needs no beta term;
    // model: gamma + d ln(s^2) + s^{-2} corrections
    auto gd_fit = [&](std::size_t first) {
        std::vector<std::array<double, 4>> X;
        std::vector<double> y;
        for (std::size_t i = first; i < n; ++i) {
            const double s = levels[i];
            const double l2 = 2.0 * std::log(s);
            X.push_back({1.0, l2, 1.0 / (s * s), l2 / (s * s)});
            y.push_back(vmean[i]);
        }
        return least_squares(X, y, 4);
    };
    const auto c_half = gd_fit(n / 2);
    const auto c_third = gd_fit((2 * n) / 3);
    io.gamma = c_half[0];
    io.d = c_half[1];
    io.errors["gamma"] = std::abs(c_half[0] - c_third[0]);
    io.errors["d"] = std::abs(c_half[1] - c_third[1]);
    io.A = A;
    io.Q = f.Q;
}

void fit_d1_d2(const ExteriorSolution& sol, const std::vector<double>& radii,
               int n_theta, ExpansionCoeffs& io) {
    if (!io.A || !io.beta || !io.gamma || !io.d)
        throw Error("fit_d1_d2 needs the earlier fits");
    const auto f = q_frame(sol.tau(), *io.A);
    const std::size_t n = radii.size();
    std::vector<double> ss, i1, i2;
    auto collect = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi && i < n; ++i) {
            const double s = radii[i];
            if (!level_in_domain(sol, f, s)) continue;
            double c1 = 0.0, c2 = 0.0;
            for (int j = 0; j < n_theta; ++j) {
                const double ph = 2.0 * kPi * j / n_theta;
                const Vec2 x = f.Qsi.apply({s * std::cos(ph), s * std::sin(ph)});
                const double w = sol.value(x) - 0.5 * io.A->quad(x) -
                                 io.beta->dot(x) - *io.gamma -
                                 *io.d * std::log(s * s);
                c1 += s * w * std::cos(ph);
                c2 += s * w * std::sin(ph);
            }
            ss.push_back(s);
            i1.push_back(c1 * 2.0 / n_theta);  // (1/pi) * (2 pi / n_theta)
            i2.push_back(c2 * 2.0 / n_theta);
        }
    };
    // moderate radii: cancellation in w grows like r |u| eps at the ladder top
    collect(n / 4, n / 2 + 1);
    if (ss.size() < 4) collect(n / 2 + 1, (3 * n) / 4);
    if (ss.size() < 4) throw NotConverging("too few rings for the d1/d2 limit");
    std::vector<std::array<double, 4>> X;
    for (double s : ss) X.push_back({1.0, 1.0 / (s * s), 0.0, 0.0});
    const auto f1 = least_squares(X, i1, 2);
    const auto f2 = least_squares(X, i2, 2);
    io.d1 = f1[0];
    io.d2 = f2[0];
    std::vector<std::array<double, 4>> Xh(X.begin() + X.size() / 2, X.end());
    std::vector<double> i1h(i1.begin() + i1.size() / 2, i1.end());
    std::vector<double> i2h(i2.begin() + i2.size() / 2, i2.end());
    io.errors["d1"] = std::abs(least_squares(Xh, i1h, 2)[0] - f1[0]);
    io.errors["d2"] = std::abs(least_squares(Xh, i2h, 2)[0] - f2[0]);
}

ExpansionCoeffs fit_expansion(const ExteriorSolution& sol,
                              const std::vector<double>& radii, int n_theta) {
    ExpansionCoeffs out;
    double a_err = 0.0;
    const Sym2 A = fit_A(sol, radii, n_theta, &a_err);
    out.errors["A"] = a_err;
    fit_beta_gamma_d(sol, A, radii, n_theta, out);
    fit_d1_d2(sol, radii, n_theta, out);
    return out;
}

DecayCertificate remainder_check(const ExteriorSolution& sol,
                                 const ExpansionCoeffs& coeffs,
                                 const std::vector<double>& radii, int n_theta) {
    if (!coeffs.A || !coeffs.beta || !coeffs.gamma || !coeffs.d || !coeffs.Q)
        throw Error("remainder_check needs the full coefficient set");
    const Sym2 Qs = sym_sqrt(*coeffs.Q);
    const double d1 = coeffs.d1.value_or(0.0), d2 = coeffs.d2.value_or(0.0);
    std::vector<double> sups(radii.size(), 0.0), scales(radii.size(), 1.0);
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * kPi * j / n_theta;
            const Vec2 x{radii[i] * std::cos(th), radii[i] * std::sin(th)};
            const double q = coeffs.Q->quad(x);
            const Vec2 y = Qs.apply(x);
            const double tq = std::atan2(y.x2, y.x1);
            const double rem = sol.value(x) - 0.5 * coeffs.A->quad(x) -
                               coeffs.beta->dot(x) - *coeffs.gamma -
                               *coeffs.d * std::log(q) -
                               (d1 * std::cos(tq) + d2 * std::sin(tq)) /
                                   std::sqrt(q);
            sups[i] = std::max(sups[i], std::abs(rem));
            scales[i] = std::max(scales[i], std::abs(sol.value(x)));
        }
    // slope over the outer decades when enough rings remain there
    std::vector<double> rs = radii, vs = sups, ss = scales;
    {
        std::vector<double> rf, vf, sf2;
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (radii[i] >= 100.0) {
                rf.push_back(radii[i]);
                vf.push_back(sups[i]);
                sf2.push_back(scales[i]);
            }
        if (rf.size() >= 6 && rf.back() >= 99.0 * rf.front()) {
            rs = rf;
            vs = vf;
            ss = sf2;
        }
    }
    DecayCertificate cert;
    cert.k1 = 4.0;  // envelope r^{2-k1} (ln r)^{k2+1} = r^{-2} ln r
    cert.k2 = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        cert.sup_ratio = std::max(
            cert.sup_ratio, vs[i] * rs[i] * rs[i] / std::log(rs[i]));
        cert.sup_abs = std::max(cert.sup_abs, vs[i]);
    }
    // rings whose remainder sits at the roundoff floor of the large
    // quadratic terms carry no information about the analytic decay; drop
    // them from the slope fit when enough measurable rings remain
    std::vector<double> rm, vm;
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (vs[i] > 64.0 * std::numeric_limits<double>::epsilon() * ss[i]) {
            rm.push_back(rs[i]);
            vm.push_back(vs[i]);
        }
    if (rm.size() >= 6 && rm.back() >= 10.0 * rm.front()) {
        // plain log-log regression on the filtered rings
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < rm.size(); ++i) {
            const double lx = std::log(rm[i]), ly = std::log(vm[i]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        const double n = double(rm.size());
        cert.slope_estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double rss = 0;
        const double b0 = (sy - cert.slope_estimate * sx) / n;
        for (std::size_t i = 0; i < rm.size(); ++i) {
            const double e = std::log(vm[i]) - b0 -
                             cert.slope_estimate * std::log(rm[i]);
            rss += e * e;
        }
        cert.slope_ci = std::sqrt(rss / std::max(1.0, n - 2.0)) /
                        std::sqrt(std::max(1e-300, sxx - sx * sx / n));
    } else {
        const auto sf = decay_slope(rs, vs);
        cert.slope_estimate = sf.slope;
        cert.slope_ci = sf.ci;
    }
    return cert;
}

double flux_d(const ExteriorSolution& sol, const TauParams& p, double c0,
              double r0, int n_quad, FluxFormula formula,
              const GeneralCoeffs* g) {
    if (n_quad < 64) throw Error("flux_d needs n_quad >= 64");
    const double d1 = flux_once(sol, p, c0, r0, n_quad, formula, g);
    const double d2 = flux_once(sol, p, c0, r0, 2 * n_quad, formula, g);
    if (std::abs(d2 - d1) > 1e-8 * (1.0 + std::abs(d2)))
        throw QuadratureStall("flux quadrature not converged at n = " +
                              std::to_string(n_quad));
    return d2;
}

FluxReport flux_independence(const ExteriorSolution& sol, const TauParams& p,
                             double c0, const std::vector<double>& contour_radii,
                             int n_quad, FluxFormula formula,
                             const GeneralCoeffs* g) {
    if (contour_radii.size() < 3)
        throw Error("flux_independence needs >= 3 contour radii");
    FluxReport rep;
    rep.formula_id = formula;
    rep.radii = contour_radii;
    for (double r0 : contour_radii)
        rep.d_values.push_back(flux_d(sol, p, c0, r0, n_quad, formula, g));
    const auto [lo, hi] =
        std::minmax_element(rep.d_values.begin(), rep.d_values.end());
    rep.spread = *hi - *lo;
    return rep;
}

QuadratureReport quadrature_selftests(const ExteriorSolution& sol, double r0,
                                      int n_quad) {
    QuadratureReport rep{};
    const double ds = 2.0 * kPi * r0 / n_quad;
    for (int j = 0; j < n_quad; ++j) {
        const double th = 2.0 * kPi * j / n_quad;
        const Vec2 nu{std::cos(th), std::sin(th)};
        const Sym2 h = sol.hessian(r0 * nu);
        rep.closed_hessian_flux += (h.m22 * nu.x1 - h.m12 * nu.x2) * ds;
        rep.constant_flux += (nu.x1 + nu.x2) * ds;
    }
    rep.closed_hessian_flux = std::abs(rep.closed_hessian_flux);
    rep.constant_flux = std::abs(rep.constant_flux);
    // point-mass normalization of Gamma = d ln(x^T Q x)
    Sym2 Q{1.5, 0.4, 1.0};
    if (sol.truth() && sol.truth()->A) Q = q_matrix(sol.tau(), *sol.truth()->A);
    const double d = 0.7;
    double lemma = 0.0;
    for (int j = 0; j < n_quad; ++j) {
        const double th = 2.0 * kPi * j / n_quad;
        const Vec2 nu{std::cos(th), std::sin(th)};
        const Vec2 x = r0 * nu;
        // Q^{-1} grad Gamma = 2 d x / (x^T Q x)
        lemma += 2.0 * d * x.dot(nu) / Q.quad(x) * ds;
    }
    rep.lemma_gap = std::abs(lemma - 4.0 * kPi * d / std::sqrt(Q.det()));
    return rep;
}

SymmetryReport symmetry_check(const ExteriorSolution& sol,
                              const ExpansionCoeffs& coeffs, int n_samples,
                              std::uint64_t seed) {
    if (!coeffs.A || !coeffs.beta) throw Error("symmetry_check needs A, beta");
    const double ang = eigen_sym2(*coeffs.A).angle;
    const double ca = std::cos(ang), sa = std::sin(ang);
    const Vec2 beta = *coeffs.beta;
    // r_min = 0 (entire solutions): sample a fixed three-decade band instead
    const double r_hi = std::isfinite(sol.r_max())
                            ? sol.r_max() * 0.99
                            : std::max(sol.r_min(), 1.0) * 1000.0;
    const double r_lo = std::max(sol.r_min() * 1.01, r_hi * 1e-3);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SymmetryReport rep;
    rep.frame.rotation_angle = ang;
    static constexpr int signs[3][2] = {{-1, 1}, {1, -1}, {-1, -1}};
    for (int i = 0; i < n_samples; ++i) {
        const double r = r_lo * std::pow(r_hi / r_lo, unit(rng));
        const double ph = 2.0 * kPi * unit(rng);
        const Vec2 x{r * std::cos(ph), r * std::sin(ph)};
        // coordinates in the eigenframe: z = O^T x, O columns = eigenvectors
        const Vec2 z{ca * x.x1 + sa * x.x2, -sa * x.x1 + ca * x.x2};
        const double base = sol.value(x) - beta.dot(x);
        for (const auto& s : signs) {
            const Vec2 zs{s[0] * z.x1, s[1] * z.x2};
            const Vec2 xt{ca * zs.x1 - sa * zs.x2, sa * zs.x1 + ca * zs.x2};
            const double refl = sol.value(xt) - beta.dot(xt);
            // scale-relative: the compared values grow like r^2
            rep.max_violation = std::max(
                rep.max_violation, std::abs(base - refl) / (1.0 + std::abs(base)));
        }
        rep.reflections_tested += 3;
    }
    return rep;
}

RadialityReport radiality_check(const ExteriorSolution& sol, double K,
                                const Sym2& A, int n_levels) {
    const Sym2 M = A + Sym2::identity() * K;
    const auto e = eigen_sym2(M);
    if (!(e.lambda1 > 0.0)) throw Error("radiality_check: A + KI not positive");
    const double r_hi = std::isfinite(sol.r_max())
                            ? sol.r_max()
                            : std::max(sol.r_min(), 1.0) * 1000.0;
    const double r_lo = std::max(sol.r_min(), r_hi * 1e-3);
    const double L_lo = 0.5 * e.lambda2 * r_lo * r_lo * 1.001;
    const double L_hi = 0.5 * e.lambda1 * r_hi * r_hi * 0.999;
    if (!(L_lo < L_hi)) throw DomainViolation("no feasible level sets");
    RadialityReport rep;
    rep.levels = n_levels;
    rep.pass = true;
    for (int i = 0; i < n_levels; ++i) {
        const double L =
            L_lo * std::pow(L_hi / L_lo, n_levels == 1 ? 0.5
                                                       : double(i) / (n_levels - 1));
        double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
        for (int j = 0; j < 64; ++j) {
            const double ph = 2.0 * kPi * j / 64;
            const Vec2 dir{std::cos(ph), std::sin(ph)};
            const double r = std::sqrt(2.0 * L / M.quad(dir));
            const Vec2 x = r * dir;
            const double v = sol.value(x) + 0.5 * K * x.dot(x);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        const double rel = (vmax - vmin) / (1.0 + std::abs(L));
        rep.max_spread = std::max(rep.max_spread, rel);
        if (rel > 1e-8) rep.pass = false;
    }
    return rep;
}

}  // namespace mgg
