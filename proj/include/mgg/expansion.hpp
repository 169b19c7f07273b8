#pragma once

#include <map>
#include <optional>
#include <string>

#include "mgg/types.hpp"

namespace mgg {

/// Coefficients of the quadratic-plus-log expansion at infinity:
///   u ~ (1/2) x^T A x + beta.x + gamma + d ln(x^T Q x)
///       + (x^T Q x)^{-1/2} (d1 cos(theta) + d2 sin(theta)),
/// theta the polar angle of Q^{1/2} x, Q the canonical polynomial of A.
/// Fields are optional so the struct can also carry partial ground truth.
struct ExpansionCoeffs {
    std::optional<Sym2> A;
    std::optional<Vec2> beta;
    std::optional<double> gamma;
    std::optional<double> d;
    std::optional<double> d1;
    std::optional<double> d2;
    std::optional<Sym2> Q;
    std::map<std::string, double> errors;  // per-field error estimates
};

}  // namespace mgg
