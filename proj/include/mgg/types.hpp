#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mgg {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2() = default;
    Vec2(double a, double b) : x1(a), x2(b) {}

    Vec2 operator+(const Vec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
    Vec2 operator-(const Vec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
    Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    Vec2 operator-() const { return {-x1, -x2}; }
    double dot(const Vec2& o) const { return x1 * o.x1 + x2 * o.x2; }
    double norm() const { return std::hypot(x1, x2); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// 2x2 real symmetric matrix, three stored entries.
struct Sym2 {
    double m11 = 0.0;
    double m12 = 0.0;
    double m22 = 0.0;

    Sym2() = default;
    Sym2(double a11, double a12, double a22) : m11(a11), m12(a12), m22(a22) {}

    static Sym2 identity() { return {1.0, 0.0, 1.0}; }
    static Sym2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

    Sym2 operator+(const Sym2& o) const { return {m11 + o.m11, m12 + o.m12, m22 + o.m22}; }
    Sym2 operator-(const Sym2& o) const { return {m11 - o.m11, m12 - o.m12, m22 - o.m22}; }
    Sym2 operator*(double s) const { return {m11 * s, m12 * s, m22 * s}; }

    Vec2 apply(const Vec2& v) const {
        return {m11 * v.x1 + m12 * v.x2, m12 * v.x1 + m22 * v.x2};
    }
    double quad(const Vec2& v) const { return v.dot(apply(v)); }

    double det() const { return m11 * m22 - m12 * m12; }
    double trace() const { return m11 + m22; }
    double max_abs() const {
        return std::max({std::abs(m11), std::abs(m12), std::abs(m22)});
    }

    Sym2 inverse() const {
        const double dd = det();
        return {m22 / dd, -m12 / dd, m11 / dd};
    }

    /// A*A (symmetric since A is).
    Sym2 squared() const {
        return {m11 * m11 + m12 * m12, m12 * (m11 + m22), m12 * m12 + m22 * m22};
    }
};

inline Sym2 operator*(double s, const Sym2& m) { return m * s; }

/// v v^T scaled outer product.
inline Sym2 outer(const Vec2& v) { return {v.x1 * v.x1, v.x1 * v.x2, v.x2 * v.x2}; }

// ---- error types ----

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InadmissibleEigenvalues : Error { using Error::Error; };
struct NoAdmissiblePartner : Error { using Error::Error; };
struct StructureViolation : Error { using Error::Error; };
struct AdmissibilityLost : Error { using Error::Error; };
struct RangeExceeded : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };
struct ConvexityMargin : Error { using Error::Error; };
struct InversionFailure : Error { using Error::Error; };
struct Aliasing : Error { using Error::Error; };
struct TailDivergence : Error { using Error::Error; };
struct InsufficientRings : Error { using Error::Error; };
struct NotConverging : Error { using Error::Error; };
struct QuadratureStall : Error { using Error::Error; };
struct ConfigInvalid : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

}  // namespace mgg
