#pragma once

#include "mgg/operators.hpp"
#include "mgg/solutions.hpp"

namespace mgg {

enum class MapKind { LegendreSmallTau, RotationLargeTau, ThreeTerm };

/// A primal/dual pair linked by one of the transforms: the partial Legendre
/// dual for tau in (0, pi/4), the Lewy-style rotation for tau in
/// (pi/4, pi/2), or the three-term shift-and-conjugate reduction.
struct DualPair {
    ExteriorSolution primal;
    ExteriorSolution dual;
    double shift;  // per-eigenvalue Hessian shift: a + b, or c1/c2
    double scale;  // the 2b factor (1 for ThreeTerm)
    MapKind map_kind;
    bool negated = false;  // three-term concave branch handled as -u
};

/// Partial Legendre dual of a LogQuotient-branch solution: with
/// ubar = u + ((a+b)/2)|x|^2 and v the convex conjugate of ubar, the dual is
/// utilde(xt) = |xt|^2/2 - 2b v(xt). Its Hessian eigenvalues are
/// (lambda_i + a - b)/(lambda_i + a + b) in (0,1) and it satisfies
/// sum ln(lambda_i~) = (2b/sqrt(a^2+1)) C0.
DualPair legendre_dual(const ExteriorSolution& sol, const TauParams& p);

/// v = u/b + (a/2b)|x|^2 for an ArctanQuotient-branch solution; v satisfies
/// the special Lagrangian equation with constant b C0 / sqrt(a^2+1) + pi/2.
ExteriorSolution rotate_large_tau(const ExteriorSolution& sol, const TauParams& p);

/// Reduce a solution of the three-term equation to a Monge-Ampere dual with
/// det = c2^2/(c1^2 - c0 c2) via the shift c1/c2 and a plain Legendre
/// conjugate. Falls back to -u when the convexity bound only holds there.
DualPair three_term_reduce(const ExteriorSolution& sol, const GeneralCoeffs& g);

/// Invert the gradient map xt = Du(x) + shift * x by damped Newton.
Vec2 invert_gradient_map(const ExteriorSolution& sol, double shift,
                         const Vec2& xt, const Vec2& guess);

}  // namespace mgg
