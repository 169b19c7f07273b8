#pragma once

#include <optional>
#include <vector>

#include "mgg/rings.hpp"
#include "mgg/types.hpp"

namespace mgg {

/// One Fourier coefficient series a_{k,m}(r) or b_{k,m}(r) over the radius
/// ladder. m = 1 is the cos(k theta) component, m = 2 the sin(k theta)
/// component (absent for k = 0). Basis: Y_1^{(0)} = 1/sqrt(2 pi),
/// Y_1^{(k)} = cos(k theta)/sqrt(pi), Y_2^{(k)} = sin(k theta)/sqrt(pi).
struct ModeSeries {
    int k = 0;
    int m = 1;
    std::vector<double> coeffs;  // indexed like the radius ladder
};

/// Power-log tail model |b(r)| ~ c r^{-k1} (ln r)^{k2}; k2 must be a
/// nonnegative integer for the analytic tail integrals.
struct TailModel {
    double k1;
    double k2;
};

struct DecayCertificate {
    double k1 = 0.0;
    double k2 = 0.0;
    double sup_ratio = 0.0;       // sup over rings of |v| r^{k1-2} (ln r)^{-k2-1}
    double sup_abs = 0.0;         // plain sup over rings of |v|
    double slope_estimate = 0.0;  // log-log regression slope
    double slope_ci = 0.0;
};

struct SlopeFit {
    double slope;
    double ci;            // 1-sigma from residual variance
    double log_exponent;  // coefficient of ln ln r when correction enabled
};

/// Trapezoidal projection of scalar ring samples onto the circle harmonics,
/// k = 0..kmax. Exact for band-limited inputs; throws Aliasing when
/// kmax >= n_theta/2.
std::vector<ModeSeries> project_modes(const RingSamples& rings, int kmax);

/// Particular solution of a'' + a'/r = b with tails taken at +infinity.
ModeSeries solve_mode0(const ModeSeries& b, const std::vector<double>& radii,
                       const TailModel& tail);

/// Particular solution of a'' + a'/r - k^2 a / r^2 = b. For k < k1 - 2 both
/// quadratures use tails to +infinity; otherwise the r^{-k}-weighted integral
/// starts at the innermost ladder radius.
ModeSeries solve_modek(int k, const ModeSeries& b, const std::vector<double>& radii,
                       const TailModel& tail);

struct PoissonResult {
    RingSamples v;
    DecayCertificate cert;
    std::vector<ModeSeries> modes;
};

/// Assemble an exterior Poisson solution Laplacian(v) = g mode by mode.
PoissonResult poisson_solve(const RingSamples& g, double k1, double k2, int kmax);

/// Least-squares slope of ln(sup) against ln(r); with_log_correction adds a
/// ln(ln r) regressor. Requires >= 6 rings spanning >= 2 decades.
SlopeFit decay_slope(const std::vector<double>& radii,
                     const std::vector<double>& sups,
                     bool with_log_correction = false);

// --- quadrature helpers (uniform-in-ln-r ladders) ---

/// Cumulative integral of samples f(r_i) on a geometric ladder, from each
/// node to the outermost node, using end-corrected (Gregory) trapezoid in
/// ln r. Returns I[i] = integral_{r_i}^{r_max} f dr.
std::vector<double> cumulative_outer_integral(const std::vector<double>& radii,
                                              const std::vector<double>& f);

/// integral_r^infinity t^p (ln t)^m dt for p < -1, integer m >= 0.
double powerlog_tail_integral(double p, int m, double r);

}  // namespace mgg
