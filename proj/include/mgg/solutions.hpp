#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mgg/expansion.hpp"
#include "mgg/operators.hpp"
#include "mgg/rings.hpp"
#include "mgg/types.hpp"

namespace mgg {

struct EvalResult {
    double value;
    Vec2 grad;
    Sym2 hess;
};

/// Rotation + translation + affine addition applied to a solution:
///   x -> sol(R(-angle) (x - x0)) + beta_add . x + gamma_add.
struct AffineFrame {
    double rotation_angle = 0.0;
    Vec2 x0{};
    Vec2 beta_add{};
    double gamma_add = 0.0;
};

class SolutionImpl;

/// Evaluable exterior solution of the operator equation, defined for
/// r_min <= |x| <= r_max. Immutable after construction; cheap to copy.
class ExteriorSolution {
  public:
    explicit ExteriorSolution(std::shared_ptr<const SolutionImpl> impl);

    EvalResult eval(const Vec2& x) const;  // throws DomainViolation outside
    double value(const Vec2& x) const { return eval(x).value; }
    Vec2 gradient(const Vec2& x) const { return eval(x).grad; }
    Sym2 hessian(const Vec2& x) const { return eval(x).hess; }

    double r_min() const;
    double r_max() const;  // +inf when unbounded
    const TauParams& tau() const;
    double c0() const;
    const std::optional<ExpansionCoeffs>& truth() const;

    nlohmann::json to_json() const;
    static ExteriorSolution from_json(const nlohmann::json& j);

  private:
    std::shared_ptr<const SolutionImpl> impl_;
};

/// Radial profile U(r): p = U', dp = U'', with f_tau(dp, p/r) = C0 pointwise.
struct RadialProfile {
    std::vector<double> r_grid;
    std::vector<double> p;
    std::vector<double> dp;
    std::vector<double> U;
    TauParams tau;
    double C0;
};

/// Isotropic Monge-Ampere family U'(r) = sqrt(e^{2 C0} r^2 + c1), which has
/// det D^2 u = e^{2 C0} exactly. Known coefficients: A = e^{C0} I, beta = 0,
/// d = c1 e^{-C0}/4, d1 = d2 = 0.
ExteriorSolution ma_radial_exact(double C0, double c1);

/// The same family with the alternative normalization
/// u = e^{C0} \int_0^{(x^T A x)^{1/2}} (r^2 + c1)^{1/2} dr, A = e^{C0} I.
/// Kept for reports only: its Hessian determinant is not e^{2 C0}.
ExteriorSolution ma_radial_prefactor_variant(double C0, double c1);

/// Special Lagrangian radial family U'(r) = sqrt(r^2 + c1) with C0 = pi/2;
/// d = c1/4.
ExteriorSolution sl_radial_exact(double c1);

/// Anisotropic Monge-Ampere solution u(x) = u_iso(B x) with det B = 1,
/// B symmetric positive. Known A = e^{C0} B^2, d = c1 e^{-C0}/4.
ExteriorSolution ma_affine(double C0, double c1, const Sym2& B);

/// Global quadratic (1/2) x^T A x + beta.x + gamma; C0 = F_tau(lambda(A)).
ExteriorSolution quadratic_solution(const TauParams& p, const Sym2& A,
                                    const Vec2& beta, double gamma);

/// Integrate the radial reduction p' = partner(C0, p/r) from (r0, p0).
RadialProfile radial_ode_solve(const TauParams& p, double C0, double r0,
                               double p0, double rmax);

/// Wrap a radial profile as an evaluable solution (quintic Hermite between
/// the stored nodes; Hessian from the exact partner relation).
ExteriorSolution make_solution(RadialProfile profile);

/// Apply a rigid motion plus linear addition; transports ground truth.
ExteriorSolution transform(const ExteriorSolution& sol, const AffineFrame& frame);

/// Evaluator-backed solution for tests; not serializable.
ExteriorSolution custom_solution(const TauParams& p, double C0, double r_min,
                                 double r_max,
                                 std::function<EvalResult(const Vec2&)> fn);

struct RingSampleSet {
    RingSamples value;
    RingSamples gradient;
    RingSamples hessian;
};

RingSampleSet sample_rings(const ExteriorSolution& sol,
                           const std::vector<double>& radii, int n_theta);

}  // namespace mgg
