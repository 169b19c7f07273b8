#pragma once

#include <limits>
#include <optional>

#include "mgg/types.hpp"

namespace mgg {

/// The five branches of the operator family on [0, pi/2].
enum class Branch {
    MA,                 // tau = 0, log-det
    LogQuotient,        // tau in (0, pi/4)
    InverseHarmonic,    // tau = pi/4
    ArctanQuotient,     // tau in (pi/4, pi/2)
    SpecialLagrangian,  // tau = pi/2
};

const char* branch_name(Branch b);

/// Branch descriptor with the derived parameters a = cot(tau),
/// b = sqrt(|cot^2(tau) - 1|). At tau = 0 the a, b slots hold +inf and the
/// MA branch never reads them.
struct TauParams {
    double tau;
    double a;
    double b;
    Branch branch;

    static TauParams from_tau(double tau);
};

/// Eigenvalue lower bound for the semi-convex admissibility condition.
/// no lower bound (nullopt) for tau = pi/2, where C0 != 0 is required instead.
struct Admissibility {
    std::optional<double> lower_bound;
    bool c0_nonzero_required = false;
};

Admissibility admissibility_for(const TauParams& p);

bool is_admissible(const TauParams& p, double lambda);

/// Three-term family c2*l1*l2 + c1*(l1+l2) + c0 = 0.
struct GeneralCoeffs {
    double c0;
    double c1;
    double c2;
};

/// Closed-form eigendecomposition: lambda1 <= lambda2, angle is the polar
/// angle of the lambda2 eigenvector (0 when lambda1 == lambda2).
struct EigenSym2 {
    double lambda1;
    double lambda2;
    double angle;
};

EigenSym2 eigen_sym2(const Sym2& m);

/// Rebuild the matrix from an eigendecomposition.
Sym2 from_eigen(double lambda1, double lambda2, double angle);

/// Rotation matrix R(angle) applied as R M R^T.
Sym2 conjugate_by_rotation(const Sym2& m, double angle);

/// Symmetric square root of a positive matrix.
Sym2 sym_sqrt(const Sym2& m);

double f_tau(const TauParams& p, double lambda1, double lambda2);

/// Derivative of the per-eigenvalue branch formula; equals
/// 1 / (sin(tau) l^2 + 2 cos(tau) l + sin(tau)) on every branch.
double df_tau(const TauParams& p, double lambda);

/// DF(A): symmetric matrix with eigenvalues df_tau on A's eigenframe.
Sym2 df_matrix(const TauParams& p, const Sym2& a);

/// Canonical Q = (1/2)(sin(tau) A^2 + 2 cos(tau) A + sin(tau) I).
/// Satisfies Q * DF(A) = I/2.
Sym2 q_matrix(const TauParams& p, const Sym2& a);

/// Invert f_tau(p, lambda_known, .) = c0 in closed form.
double solve_partner_eigenvalue(const TauParams& p, double c0, double lambda_known);

/// arctan((l+a-b)/(l+a+b)) - [arctan((l+a)/b) - pi/4], ArctanQuotient branch;
/// summing two eigenvalues recovers the -pi/2 form of the identity.
double arctan_identity_gap(const TauParams& p, double lambda);

/// Reduce the three-term equation to (l1 + shift)(l2 + shift) = product.
struct GeneralNormalized {
    double shift;    // c1/c2
    double product;  // (c1^2 - c0 c2)/c2^2 > 0
};

GeneralNormalized general_normalize(const GeneralCoeffs& g);

}  // namespace mgg
