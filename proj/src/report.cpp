#include "mgg/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "mgg/asymptotics.hpp"
#include "mgg/harmonics.hpp"
#include "mgg/legendre.hpp"
#include "mgg/solutions.hpp"

namespace mgg {

namespace {
constexpr double kPi = std::numbers::pi;

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_canonical(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_canonical(j[i], out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float:
            out += g17(j.get<double>());
            break;
        default:
            out += j.dump();
            break;
    }
}

struct Ctx {
    const RunConfig& cfg;
    Report& rep;

    double tol(const std::string& name, double dflt) const {
        auto it = cfg.tolerances.find(name);
        return it == cfg.tolerances.end() ? dflt : it->second;
    }
    void check_abs(const std::string& name, double value, double t) {
        rep.checks.push_back({name, value, t, std::abs(value) <= t});
    }
    void check_le(const std::string& name, double value, double bound) {
        rep.checks.push_back({name, value, bound, value <= bound});
    }
    void cert(const std::string& name, double value) {
        rep.certificates.push_back({name, value});
    }
};

std::vector<double> default_ladder(const Ladder& l) {
    return geometric_ladder(l.r_min, l.r_max, l.n_rings);
}

void coeff_rows(Ctx& c, const std::string& prefix, const ExpansionCoeffs& fit,
                const std::optional<ExpansionCoeffs>& truth) {
    auto row = [&](const std::string& name, std::optional<double> v,
                   std::optional<double> oracle, double err, double t) {
        if (!v) return;
        CoeffRow r{prefix + "." + name, *v, err, oracle, true};
        if (oracle) r.pass = std::abs(*v - *oracle) <= t;
        c.rep.coefficients.push_back(r);
    };
    auto err = [&](const char* k) {
        auto it = fit.errors.find(k);
        return it == fit.errors.end() ? 0.0 : it->second;
    };
    const double ta = c.tol("A", 1e-8), tb = c.tol("beta", 1e-8);
    const double tg = c.tol("gamma", 1e-5), td = c.tol("d", 1e-6);
    const double t12 = c.tol("d1d2", 1e-4);
    const ExpansionCoeffs* tr = truth ? &*truth : nullptr;
    auto opt = [&](std::optional<double> o) { return o; };
    if (fit.A) {
        row("A11", fit.A->m11, tr && tr->A ? std::optional(tr->A->m11) : std::nullopt, err("A"), ta);
        row("A12", fit.A->m12, tr && tr->A ? std::optional(tr->A->m12) : std::nullopt, err("A"), ta);
        row("A22", fit.A->m22, tr && tr->A ? std::optional(tr->A->m22) : std::nullopt, err("A"), ta);
    }
    if (fit.beta) {
        row("beta1", fit.beta->x1, tr && tr->beta ? std::optional(tr->beta->x1) : std::nullopt, err("beta"), tb);
        row("beta2", fit.beta->x2, tr && tr->beta ? std::optional(tr->beta->x2) : std::nullopt, err("beta"), tb);
    }
    row("gamma", fit.gamma, tr ? opt(tr->gamma) : std::nullopt, err("gamma"), tg);
    row("d", fit.d, tr ? opt(tr->d) : std::nullopt, err("d"), td);
    row("d1", fit.d1, tr ? opt(tr->d1) : std::nullopt, err("d1"), t12);
    row("d2", fit.d2, tr ? opt(tr->d2) : std::nullopt, err("d2"), t12);
}

/// Max residual of the operator equation over sampled rings.
double equation_residual(const ExteriorSolution& sol,
                         const std::vector<double>& radii, int n_theta) {
    double worst = 0.0;
    for (double r : radii)
        for (int j = 0; j < n_theta; ++j) {
            const double th = 2.0 * kPi * j / n_theta;
            const auto e = eigen_sym2(sol.hessian({r * std::cos(th), r * std::sin(th)}));
            worst = std::max(worst, std::abs(f_tau(sol.tau(), e.lambda1, e.lambda2) -
                                             sol.c0()));
        }
    return worst;
}

// ---- verify-all catalogue ----

void verify_exact_ma(Ctx& c) {
    const auto sol = ma_radial_exact(0.0, 1.0);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "ma_exact", fit, sol.truth());
    c.check_abs("ma_exact.d_fit_vs_oracle", *fit.d - 0.25, c.tol("d", 1e-6));

    const auto fr = flux_independence(sol, sol.tau(), sol.c0(), {5.0, 10.0, 20.0},
                                      512, FluxFormula::MA);
    for (std::size_t i = 0; i < fr.radii.size(); ++i) {
        c.rep.flux.push_back({"ma_exact.MA", fr.radii[i], fr.d_values[i]});
        c.check_abs("ma_exact.flux_i_vs_oracle_R" + std::to_string(int(fr.radii[i])),
                    fr.d_values[i] - 0.25, c.tol("flux", 1e-8));
    }
    c.check_abs("ma_exact.flux_contour_independence", fr.spread, 1e-9);
    c.check_abs("ma_exact.flux_vs_fit", fr.d_values[1] - *fit.d, 1e-6);

    const auto cert = remainder_check(sol, fit, ladder, c.cfg.ladder.n_theta);
    c.cert("ma_exact.remainder_slope", cert.slope_estimate);
    c.cert("ma_exact.remainder_sup_ratio", cert.sup_ratio);
    c.check_le("ma_exact.remainder_slope_le", cert.slope_estimate, -1.8);

    const auto q = quadrature_selftests(sol, 10.0, 512);
    c.cert("ma_exact.closed_hessian_flux", q.closed_hessian_flux);
    c.cert("ma_exact.constant_flux", q.constant_flux);
    c.cert("ma_exact.lemma51_gap", q.lemma_gap);
    c.check_abs("quadrature.closed_hessian_flux", q.closed_hessian_flux, 1e-10);
    c.check_abs("quadrature.constant_flux", q.constant_flux, 1e-10);
    c.check_abs("quadrature.lemma51_point_mass", q.lemma_gap, 1e-8);

    const auto sym = symmetry_check(sol, fit, 300, c.cfg.seed);
    c.check_abs("ma_exact.reflection_identity", sym.max_violation, 1e-10);

    const auto rad = radiality_check(sol, 0.0, *sol.truth()->A, 8);
    c.cert("ma_exact.radiality_spread", rad.max_spread);
    c.check_le("ma_exact.radiality", rad.max_spread, 1e-8);
}

void verify_exact_sl(Ctx& c) {
    const auto sol = sl_radial_exact(1.0);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "sl_exact", fit, sol.truth());
    c.check_abs("sl_exact.d_fit_vs_oracle", *fit.d - 0.25, c.tol("d", 1e-6));
    const auto fr = flux_independence(sol, sol.tau(), sol.c0(), {5.0, 10.0, 20.0},
                                      512, FluxFormula::SL);
    for (std::size_t i = 0; i < fr.radii.size(); ++i) {
        c.rep.flux.push_back({"sl_exact.SL", fr.radii[i], fr.d_values[i]});
        c.check_abs("sl_exact.flux_v_vs_oracle_R" + std::to_string(int(fr.radii[i])),
                    fr.d_values[i] - 0.25, c.tol("flux", 1e-8));
    }
    c.check_abs("sl_exact.flux_contour_independence", fr.spread, 1e-9);
}

ExteriorSolution ode_solution(double tau, double rmax) {
    const auto p = TauParams::from_tau(tau);
    const double C0 = f_tau(p, 1.0, 1.0);
    return make_solution(radial_ode_solve(p, C0, 1.0, 1.3, rmax));
}

void verify_quarter_pi(Ctx& c) {
    const auto sol = ode_solution(kPi / 4, 1.4e4);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "quarterpi_ode", fit, sol.truth());
    const double printed = flux_d(sol, sol.tau(), sol.c0(), 10.0, 512,
                                  FluxFormula::QuarterPi_paper);
    const double derived = flux_d(sol, sol.tau(), sol.c0(), 10.0, 512,
                                  FluxFormula::QuarterPi_derivation);
    c.rep.flux.push_back({"quarterpi_ode.QuarterPi_paper", 10.0, printed});
    c.rep.flux.push_back({"quarterpi_ode.QuarterPi_derivation", 10.0, derived});
    c.rep.discrepancies.push_back(
        {"flux_iii_variant",
         "the tau = pi/4 flux formula as printed weights the Hessian term by "
         "(u1 + 1); the section-5 derivation gives (u1 + x1) and flips two "
         "signs. Only the derivation variant reproduces the fitted d.",
         {{"fitted_d", *fit.d},
          {"flux_printed", printed},
          {"flux_derivation", derived},
          {"printed_minus_fit", printed - *fit.d},
          {"derivation_minus_fit", derived - *fit.d}}});
    c.check_abs("quarterpi.flux_derivation_vs_fit", derived - *fit.d, 1e-6);

    const auto rad = radiality_check(sol, 1.0, *fit.A, 6);
    c.cert("quarterpi_ode.radiality_spread_K1", rad.max_spread);
    c.check_le("quarterpi.radiality_K1", rad.max_spread, 1e-8);
}

void verify_small_tau(Ctx& c) {
    const auto p = TauParams::from_tau(kPi / 6);
    const auto sol = ode_solution(kPi / 6, 1.4e4);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "smalltau_ode", fit, sol.truth());
    const double corrected = flux_d(sol, p, sol.c0(), 10.0, 512,
                                    FluxFormula::SmallTau);
    const double printed = flux_d(sol, p, sol.c0(), 10.0, 512,
                                  FluxFormula::SmallTau_printed);
    c.rep.flux.push_back({"smalltau_ode.SmallTau", 10.0, corrected});
    c.rep.flux.push_back({"smalltau_ode.SmallTau_printed", 10.0, printed});
    c.rep.discrepancies.push_back(
        {"flux_ii_b_factor",
         "the tau in (0, pi/4) flux formula as printed evaluates to b*d; the "
         "cross-term constant in its derivation drops a factor b. The "
         "corrected form divides the printed value by b.",
         {{"fitted_d", *fit.d},
          {"flux_printed", printed},
          {"flux_corrected", corrected},
          {"printed_over_corrected", printed / corrected},
          {"b", p.b}}});
    c.check_abs("smalltau.flux_corrected_vs_fit", corrected - *fit.d, 1e-6);

    // Legendre dual checks at 100 points on a mid ring of the dual annulus
    const auto pair = legendre_dual(sol, p);
    const double rd = std::sqrt(pair.dual.r_min() *
                                std::min(pair.dual.r_max(), pair.dual.r_min() * 100.0));
    const double want = 2.0 * p.b * sol.c0() / std::sqrt(p.a * p.a + 1.0);
    double worst_const = 0.0, worst_eig = 0.0, worst_inv = 0.0;
    for (int j = 0; j < 100; ++j) {
        const double th = 2.0 * kPi * j / 100;
        const Vec2 xt{rd * std::cos(th), rd * std::sin(th)};
        const auto e = pair.dual.eval(xt);
        const auto de = eigen_sym2(e.hess);
        worst_const = std::max(
            worst_const, std::abs(std::log(de.lambda1) + std::log(de.lambda2) - want));
        const Vec2 x = invert_gradient_map(sol, pair.shift, xt, xt * (1.0 / pair.shift));
        const auto pe = eigen_sym2(sol.hessian(x));
        worst_eig = std::max(
            worst_eig,
            std::max(std::abs(de.lambda1 - (pe.lambda1 + p.a - p.b) / (pe.lambda1 + p.a + p.b)),
                     std::abs(de.lambda2 - (pe.lambda2 + p.a - p.b) / (pe.lambda2 + p.a + p.b))));
        worst_inv = std::max(worst_inv, ((xt - e.grad) * (1.0 / pair.scale) - x).norm());
    }
    c.check_abs("legendre.dual_ma_constant", worst_const, 1e-8);
    c.check_abs("legendre.eigenvalue_identity", worst_eig, 1e-7);
    c.check_abs("legendre.gradient_involution", worst_inv, 1e-8);
}

void verify_large_tau(Ctx& c) {
    const auto p = TauParams::from_tau(3.0 * kPi / 8);
    const auto sol = ode_solution(3.0 * kPi / 8, 1.4e4);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "largetau_ode", fit, sol.truth());
    const double derived = flux_d(sol, p, sol.c0(), 10.0, 512, FluxFormula::LargeTau);
    const double printed = flux_d(sol, p, sol.c0(), 10.0, 512,
                                  FluxFormula::LargeTau_printed);
    c.rep.flux.push_back({"largetau_ode.LargeTau", 10.0, derived});
    c.rep.flux.push_back({"largetau_ode.LargeTau_printed", 10.0, printed});
    c.rep.discrepancies.push_back(
        {"flux_iv_variant",
         "the tau in (pi/4, pi/2) flux formula as printed does not match the "
         "special-Lagrangian pullback it is derived from; the derivation form "
         "(rotated formula (v) divided through by b) reproduces the fitted d. "
         "The printed token a_1 x_1 is read as a*x1 in both variants.",
         {{"fitted_d", *fit.d},
          {"flux_printed", printed},
          {"flux_derivation", derived},
          {"derivation_minus_fit", derived - *fit.d}}});
    c.check_abs("largetau.flux_derivation_vs_fit", derived - *fit.d, 1e-6);

    // rotation to the special Lagrangian equation
    const auto v = rotate_large_tau(sol, p);
    double worst = 0.0;
    for (double r : {2.0, 10.0, 100.0, 1000.0})
        for (int j = 0; j < 64; ++j) {
            const double th = 2.0 * kPi * j / 64;
            const auto e = eigen_sym2(v.hessian({r * std::cos(th), r * std::sin(th)}));
            worst = std::max(worst, std::abs(std::atan(e.lambda1) +
                                             std::atan(e.lambda2) - v.c0()));
        }
    c.check_abs("rotation.sl_equation_residual", worst, 1e-9);
}

void verify_q_factor(Ctx& c) {
    std::mt19937_64 rng(c.cfg.seed + 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_half = 0.0, worst_one = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double tau = 0.05 + 0.9 * (kPi / 2) * unit(rng);
        const auto p = TauParams::from_tau(tau);
        const auto adm = admissibility_for(p);
        const double lo = adm.lower_bound ? *adm.lower_bound : -3.0;
        const double l1 = lo + 0.1 + 3.0 * unit(rng);
        const double l2 = lo + 0.1 + 3.0 * unit(rng);
        const Sym2 A = from_eigen(l1, l2, kPi * unit(rng));
        const Sym2 Q = q_matrix(p, A);
        const Sym2 D = df_matrix(p, A);
        // QD is symmetric since Q and D commute (same eigenframe)
        const Sym2 QD{Q.m11 * D.m11 + Q.m12 * D.m12,
                      Q.m11 * D.m12 + Q.m12 * D.m22,
                      Q.m12 * D.m12 + Q.m22 * D.m22};
        worst_half = std::max(worst_half,
                              (QD - 0.5 * Sym2::identity()).max_abs());
        worst_one = std::max(worst_one, (QD - Sym2::identity()).max_abs());
    }
    c.rep.discrepancies.push_back(
        {"q_factor_of_two",
         "with Q = (1/2)(sin(tau) A^2 + 2 cos(tau) A + sin(tau) I), the "
         "product Q * DF(A) equals I/2, not I; the inverse-of-DF claim for Q "
         "holds only up to this factor 2. The canonical Q keeps the stated "
         "polynomial and the identity Q*DF = I/2 is asserted throughout.",
         {{"max_abs_QDF_minus_half_identity", worst_half},
          {"max_abs_QDF_minus_identity", worst_one}}});
    c.check_abs("operators.q_times_df_equals_half_identity", worst_half, 1e-12);
}

void verify_mode_signs(Ctx& c) {
    const auto radii = geometric_ladder(2.0, 2000.0, 160);
    ModeSeries b{1, 1, {}};
    for (double r : radii) b.coeffs.push_back(std::pow(r, -4.0));
    const TailModel tail{4.0, 0.0};
    const auto a = solve_modek(1, b, radii, tail);
    double rel_corr = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double exact = 1.0 / (3.0 * radii[i] * radii[i]);
        rel_corr = std::max(rel_corr, std::abs(a.coeffs[i] - exact) / exact);
    }
    // with the signs as printed both quadrature terms flip: a -> -a
    double rel_printed = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double exact = 1.0 / (3.0 * radii[i] * radii[i]);
        rel_printed = std::max(rel_printed, std::abs(-a.coeffs[i] - exact) / exact);
    }
    ModeSeries b0{0, 1, b.coeffs};
    const auto a0 = solve_mode0(b0, radii, tail);
    double rel0 = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double exact = 1.0 / (4.0 * radii[i] * radii[i]);
        rel0 = std::max(rel0, std::abs(a0.coeffs[i] - exact) / exact);
    }
    c.rep.discrepancies.push_back(
        {"mode_ode_sign",
         "the k >= 1 particular solution of a'' + a'/r - k^2 a/r^2 = b is "
         "written with both quadrature terms negated relative to the "
         "variation-of-parameters result; as printed it solves the equation "
         "with -b. The solver uses the corrected signs (k = 0 is correct as "
         "printed).",
         {{"corrected_rel_error_k1", rel_corr},
          {"printed_sign_rel_error_k1", rel_printed},
          {"k0_rel_error", rel0}}});
    c.check_abs("modes.k1_closed_form", rel_corr, 1e-8);
    c.check_abs("modes.k0_closed_form", rel0, 1e-8);

    // manufactured Poisson solve with a mixed-mode right-hand side
    RingSamples g;
    g.radii = radii;
    g.thetas = uniform_angles(64);
    g.kind = RingKind::scalar;
    g.comps.assign(1, std::vector<std::vector<double>>(
                          radii.size(), std::vector<double>(64)));
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (int j = 0; j < 64; ++j)
            g.comps[0][i][j] = std::pow(radii[i], -4.0) *
                               (1.0 + std::cos(g.thetas[j]) +
                                std::sin(3.0 * g.thetas[j]));
    const auto pr = poisson_solve(g, 4.0, 0.0, 8);
    c.cert("poisson.sup_ratio", pr.cert.sup_ratio);
    c.cert("poisson.decay_slope", pr.cert.slope_estimate);
    c.check_le("poisson.decay_slope_le", pr.cert.slope_estimate, -1.8);
    c.check_le("poisson.sup_ratio_bounded", pr.cert.sup_ratio, 10.0);
}

void verify_normalization(Ctx& c) {
    const double C0 = 0.3;
    const auto consistent = ma_radial_exact(C0, 1.0);
    const auto variant = ma_radial_prefactor_variant(C0, 1.0);
    const Vec2 x{3.0, 4.0};
    const double want = std::exp(2.0 * C0);
    const double gap_consistent = std::abs(consistent.hessian(x).det() - want);
    const double gap_variant = std::abs(variant.hessian(x).det() - want);
    c.rep.discrepancies.push_back(
        {"radial_normalization",
         "of the two radial Monge-Ampere normalizations in circulation, the "
         "prefactor form e^{C0} int sqrt(r^2 + c1) does not have Hessian "
         "determinant e^{2 C0}; the adopted family U' = sqrt(e^{2 C0} r^2 + "
         "c1) does, and the prefactor form is kept only as a reported "
         "variant (it coincides with the adopted family at doubled constant "
         "and rescaled c1).",
         {{"adopted_det_gap", gap_consistent},
          {"prefactor_variant_det_gap", gap_variant},
          {"target_det", want}}});
    c.check_abs("normalization.adopted_det_gap", gap_consistent, 1e-10);
}

void run_verify_all(Ctx& c) {
    verify_exact_ma(c);
    verify_exact_sl(c);
    verify_quarter_pi(c);
    verify_small_tau(c);
    verify_large_tau(c);
    verify_q_factor(c);
    verify_mode_signs(c);
    verify_normalization(c);
}

ExteriorSolution config_solution(const RunConfig& cfg) {
    if (!cfg.solution)
        throw ConfigInvalid("scenario '" + cfg.scenario +
                            "' needs a solution descriptor");
    return ExteriorSolution::from_json(*cfg.solution);
}

void run_generate(Ctx& c) {
    const auto sol = config_solution(c.cfg);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto rings = sample_rings(sol, ladder, c.cfg.ladder.n_theta);
    c.rep.ring_files["value"] = rings.value.to_csv();
    c.rep.ring_files["gradient"] = rings.gradient.to_csv();
    c.rep.ring_files["hessian"] = rings.hessian.to_csv();
    const double res = equation_residual(sol, ladder, 32);
    c.cert("generate.equation_residual", res);
    c.check_abs("generate.equation_residual", res, c.tol("residual", 1e-9));
}

void run_expand(Ctx& c) {
    const auto sol = config_solution(c.cfg);
    const auto ladder = default_ladder(c.cfg.ladder);
    const auto fit = fit_expansion(sol, ladder, c.cfg.ladder.n_theta);
    coeff_rows(c, "expand", fit, sol.truth());
    const auto cert = remainder_check(sol, fit, ladder, c.cfg.ladder.n_theta);
    c.cert("expand.remainder_slope", cert.slope_estimate);
    c.cert("expand.remainder_sup_ratio", cert.sup_ratio);
    // a remainder at roundoff level has a meaningless slope (exact families)
    const double scale =
        1.0 + std::abs(sol.value({ladder.back(), 0.0}));
    if (cert.sup_abs > 1e-12 * scale)
        c.check_le("expand.remainder_slope_le", cert.slope_estimate, -1.8);
    else
        c.check_abs("expand.remainder_roundoff", cert.sup_abs, 1e-12 * scale);
}

void run_flux(Ctx& c) {
    const auto sol = config_solution(c.cfg);
    const double base = std::max(2.0, sol.r_min() * 1.5);
    const auto formula = canonical_flux_formula(sol.tau().branch);
    const auto fr = flux_independence(sol, sol.tau(), sol.c0(),
                                      {base, 2 * base, 4 * base}, 512, formula);
    double dref = 0.0;
    for (std::size_t i = 0; i < fr.radii.size(); ++i) {
        c.rep.flux.push_back({flux_formula_name(formula), fr.radii[i], fr.d_values[i]});
        dref = std::max(dref, std::abs(fr.d_values[i]));
    }
    c.check_abs("flux.contour_independence", fr.spread, 1e-7 * (1.0 + dref));
}

void run_poisson(Ctx& c) {
    verify_mode_signs(c);
}

void run_legendre(Ctx& c) {
    const auto sol = config_solution(c.cfg);
    const auto& p = sol.tau();
    if (p.branch == Branch::LogQuotient) {
        const auto pair = legendre_dual(sol, p);
        const double want = 2.0 * p.b * sol.c0() / std::sqrt(p.a * p.a + 1.0);
        const double rd = std::sqrt(
            pair.dual.r_min() *
            std::min(pair.dual.r_max(), pair.dual.r_min() * 100.0));
        double worst = 0.0;
        for (int j = 0; j < 100; ++j) {
            const double th = 2.0 * kPi * j / 100;
            const auto de = eigen_sym2(
                pair.dual.hessian({rd * std::cos(th), rd * std::sin(th)}));
            worst = std::max(worst, std::abs(std::log(de.lambda1) +
                                             std::log(de.lambda2) - want));
        }
        c.check_abs("legendre.dual_ma_constant", worst, 1e-8);
    } else if (p.branch == Branch::ArctanQuotient) {
        const auto v = rotate_large_tau(sol, p);
        double worst = 0.0;
        for (double r : {2.0, 10.0, 100.0})
            for (int j = 0; j < 64; ++j) {
                const double th = 2.0 * kPi * j / 64;
                const auto e = eigen_sym2(v.hessian({r * std::cos(th), r * std::sin(th)}));
                worst = std::max(worst, std::abs(std::atan(e.lambda1) +
                                                 std::atan(e.lambda2) - v.c0()));
            }
        c.check_abs("rotation.sl_equation_residual", worst, 1e-9);
    } else {
        throw ConfigInvalid("legendre scenario needs a log-quotient or "
                            "arctan-quotient branch solution");
    }
}

}  // namespace

// ---- RunConfig ----

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> allowed{
        "schema_version", "scenario", "solution", "ladder",
        "tolerances",     "out",      "format",   "threads", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigInvalid("unknown config key: " + it.key());
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
        throw ConfigInvalid("config needs schema_version = 1");
    RunConfig cfg;
    if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
    if (j.contains("solution")) cfg.solution = j.at("solution");
    if (j.contains("ladder")) {
        const auto& l = j.at("ladder");
        static const std::set<std::string> lkeys{"r_min", "r_max", "n_rings",
                                                 "n_theta"};
        for (auto it = l.begin(); it != l.end(); ++it)
            if (!lkeys.count(it.key()))
                throw ConfigInvalid("unknown ladder key: " + it.key());
        if (l.contains("r_min")) cfg.ladder.r_min = l.at("r_min").get<double>();
        if (l.contains("r_max")) cfg.ladder.r_max = l.at("r_max").get<double>();
        if (l.contains("n_rings")) cfg.ladder.n_rings = l.at("n_rings").get<int>();
        if (l.contains("n_theta")) cfg.ladder.n_theta = l.at("n_theta").get<int>();
    }
    if (j.contains("tolerances"))
        for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
            cfg.tolerances[it.key()] = it.value().get<double>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config parse error: ") + e.what());
    }
    return from_json(j);
}

void RunConfig::validate() const {
    static const std::set<std::string> scenarios{
        "generate", "expand", "flux", "poisson", "legendre", "verify-all"};
    if (!scenarios.count(scenario))
        throw ConfigInvalid("unknown scenario: " + scenario);
    if (!(ladder.r_min > 0.0 && ladder.r_min < ladder.r_max))
        throw ConfigInvalid("ladder needs 0 < r_min < r_max");
    if (ladder.n_theta < 8 || ladder.n_theta % 2 != 0)
        throw ConfigInvalid("n_theta must be even and >= 8");
    if (ladder.n_rings < 4) throw ConfigInvalid("n_rings must be >= 4");
    for (const auto& [k, v] : tolerances)
        if (!(v > 0.0)) throw ConfigInvalid("tolerance " + k + " must be positive");
    if (threads < 1) throw ConfigInvalid("threads must be >= 1");
    if (format != "json" && format != "csv")
        throw ConfigInvalid("format must be json or csv");
}

nlohmann::json RunConfig::echo() const {
    nlohmann::json j{{"schema_version", 1},
                     {"scenario", scenario},
                     {"ladder",
                      {{"r_min", ladder.r_min},
                       {"r_max", ladder.r_max},
                       {"n_rings", ladder.n_rings},
                       {"n_theta", ladder.n_theta}}},
                     {"seed", seed}};
    if (solution) j["solution"] = *solution;
    if (!tolerances.empty()) j["tolerances"] = tolerances;
    return j;
}

// ---- Report ----

bool Report::all_pass() const {
    for (const auto& r : checks)
        if (!r.pass) return false;
    for (const auto& r : coefficients)
        if (!r.pass) return false;
    return true;
}

nlohmann::json Report::to_json() const {
    nlohmann::json j{{"schema_version", 1},
                     {"scenario", scenario},
                     {"config", config_echo},
                     {"all_pass", all_pass()}};
    if (!coefficients.empty()) {
        auto& arr = j["coefficients"] = nlohmann::json::array();
        for (const auto& r : coefficients) {
            nlohmann::json e{{"name", r.name}, {"value", r.value},
                             {"error", r.error}, {"pass", r.pass}};
            if (r.oracle) e["oracle"] = *r.oracle;
            arr.push_back(e);
        }
    }
    if (!flux.empty()) {
        auto& arr = j["flux"] = nlohmann::json::array();
        for (const auto& r : flux)
            arr.push_back({{"formula", r.formula}, {"radius", r.radius}, {"d", r.d}});
    }
    if (!certificates.empty()) {
        auto& arr = j["certificates"] = nlohmann::json::array();
        for (const auto& r : certificates)
            arr.push_back({{"name", r.name}, {"value", r.value}});
    }
    if (!discrepancies.empty()) {
        auto& arr = j["discrepancies"] = nlohmann::json::array();
        for (const auto& r : discrepancies)
            arr.push_back({{"id", r.id}, {"note", r.note}, {"evidence", r.evidence}});
    }
    if (!checks.empty()) {
        auto& arr = j["checks"] = nlohmann::json::array();
        for (const auto& r : checks)
            arr.push_back({{"name", r.name}, {"value", r.value},
                           {"tolerance", r.tolerance}, {"pass", r.pass}});
    }
    return j;
}

Report run(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = config.scenario;
    rep.config_echo = config.echo();
    Ctx ctx{config, rep};
    if (config.scenario == "verify-all") run_verify_all(ctx);
    else if (config.scenario == "generate") run_generate(ctx);
    else if (config.scenario == "expand") run_expand(ctx);
    else if (config.scenario == "flux") run_flux(ctx);
    else if (config.scenario == "poisson") run_poisson(ctx);
    else if (config.scenario == "legendre") run_legendre(ctx);
    else throw ConfigInvalid("unknown scenario: " + config.scenario);
    rep.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string canonical_dump(const nlohmann::json& j) {
    std::string out;
    dump_canonical(j, out);
    out += '\n';
    return out;
}

void emit(const Report& report, const std::string& out_dir,
          const std::string& format) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    auto write = [&](const std::string& name, const std::string& text) {
        const std::string path = out_dir + "/" + name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoFailure("cannot write " + path);
        f << text;
        if (!f) throw IoFailure("write failed: " + path);
    };
    write("report.json", canonical_dump(report.to_json()));
    if (format != "csv") return;
    {
        std::ostringstream os;
        os << "name,value,error,oracle,pass\n";
        for (const auto& r : report.coefficients)
            os << r.name << "," << g17(r.value) << "," << g17(r.error) << ","
               << (r.oracle ? g17(*r.oracle) : "") << ","
               << (r.pass ? "1" : "0") << "\n";
        write("coefficients.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "formula,radius,d\n";
        for (const auto& r : report.flux)
            os << r.formula << "," << g17(r.radius) << "," << g17(r.d) << "\n";
        write("flux.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "name,value\n";
        for (const auto& r : report.certificates)
            os << r.name << "," << g17(r.value) << "\n";
        write("certificates.csv", os.str());
    }
    for (const auto& [name, payload] : report.ring_files)
        write("rings_" + name + ".csv", payload);
}

}  // namespace mgg
