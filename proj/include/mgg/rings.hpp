#pragma once

#include <string>
#include <vector>

#include "mgg/types.hpp"

namespace mgg {

enum class RingKind { scalar, gradient, hessian };

/// Samples on concentric circles: a strictly increasing radius ladder times a
/// uniform angle grid theta_j = 2 pi j / n_theta. Vector- and matrix-valued
/// samples are stored one component plane at a time (gradient: x1, x2;
/// hessian: m11, m12, m22).
struct RingSamples {
    std::vector<double> radii;
    std::vector<double> thetas;
    RingKind kind = RingKind::scalar;
    // comps[c][i][j]: component c at radius i, angle j
    std::vector<std::vector<std::vector<double>>> comps;

    std::size_t n_radii() const { return radii.size(); }
    std::size_t n_theta() const { return thetas.size(); }
    const std::vector<std::vector<double>>& scalar() const { return comps.at(0); }

    void validate() const;

    /// CSV with columns r, theta, value... at 17 significant digits.
    std::string to_csv() const;
    static RingSamples from_csv(const std::string& text);
};

/// Uniform angle grid of even size n >= 8.
std::vector<double> uniform_angles(int n_theta);

/// Geometric radius ladder with n_rings entries from r_min to r_max.
std::vector<double> geometric_ladder(double r_min, double r_max, int n_rings);

}  // namespace mgg
