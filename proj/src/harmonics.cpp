#include "mgg/harmonics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace mgg {

namespace {
constexpr double kPi = std::numbers::pi;

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Check the ladder is geometric (uniform in ln r) and return the ln-step.
double ln_step(const std::vector<double>& radii) {
    if (radii.size() < 2) throw Error("radius ladder too short");
    const double h = std::log(radii[1] / radii[0]);
    for (std::size_t i = 1; i + 1 < radii.size(); ++i) {
        const double hi = std::log(radii[i + 1] / radii[i]);
        if (std::abs(hi - h) > 1e-9 * (1.0 + std::abs(h)))
            throw Error("radius ladder must be geometric for mode quadrature");
    }
    return h;
}

/// Solve the small Vandermonde system for interpolatory weights on integer
/// offsets covering [0,1] in the normalized variable.
std::array<double, 6> interval_weights(const std::array<int, 6>& offsets) {
    constexpr int n = 6;
    double m[n][n + 1];
    for (int q = 0; q < n; ++q) {
        for (int j = 0; j < n; ++j) m[q][j] = std::pow(double(offsets[j]), q);
        m[q][n] = 1.0 / (q + 1);  // integral of t^q over [0,1]
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int rr = c + 1; rr < n; ++rr)
            if (std::abs(m[rr][c]) > std::abs(m[piv][c])) piv = rr;
        std::swap(m[c], m[piv]);
        for (int rr = 0; rr < n; ++rr) {
            if (rr == c) continue;
            const double f = m[rr][c] / m[c][c];
            for (int j = c; j <= n; ++j) m[rr][j] -= f * m[c][j];
        }
    }
    std::array<double, 6> w{};
    for (int j = 0; j < n; ++j) w[j] = m[j][n] / m[j][j];
    return w;
}

/// Antiderivative-based integral of t^p (ln t)^m over [a, b], finite a,b > 1-ish.
double powerlog_integral(double p, int m, double a, double b) {
    if (m < 0) return 0.0;
    if (std::abs(p + 1.0) < 1e-14) {
        // integral of (ln t)^m / t
        return (std::pow(std::log(b), m + 1) - std::pow(std::log(a), m + 1)) / (m + 1);
    }
    auto anti = [&](double t) {
        // F(t) = t^{p+1} sum_{j=0..m} c_j (ln t)^{m-j}, by repeated parts
        double sum = 0.0, c = 1.0 / (p + 1.0);
        for (int j = 0; j <= m; ++j) {
            sum += c * std::pow(std::log(t), m - j);
            c *= -(double(m - j)) / (p + 1.0);
        }
        return std::pow(t, p + 1.0) * sum;
    };
    return anti(b) - anti(a);
}

struct ModeIntegrator {
    const std::vector<double>& radii;
    double h;                    // ln-step
    std::vector<double> resid;   // b minus fitted tail model
    double c_tail;               // fitted model constant
    double k1;
    int k2;

    ModeIntegrator(const std::vector<double>& r, const std::vector<double>& b,
                   const TailModel& tail)
        : radii(r), h(ln_step(r)), resid(b), k1(tail.k1),
          k2(static_cast<int>(std::lround(tail.k2))) {
        if (std::abs(tail.k2 - k2) > 1e-9 || k2 < 0)
            throw TailDivergence("tail log exponent must be a nonnegative integer");
        // Least-squares fit of the single model coefficient on the outer third.
        const std::size_t n = r.size();
        const std::size_t j0 = (2 * n) / 3;
        double num = 0.0, den = 0.0;
        for (std::size_t i = j0; i < n; ++i) {
            const double phi = model(r[i]);
            num += b[i] * phi;
            den += phi * phi;
        }
        c_tail = (den > 0.0) ? num / den : 0.0;
        for (std::size_t i = 0; i < n; ++i) resid[i] = b[i] - c_tail * model(r[i]);
    }

    double model(double r) const {
        return std::pow(r, -k1) * std::pow(std::log(r), k2);
    }

    /// I[i] = integral_{r_i}^{r_max} t^w resid(t) dt (Gauss-style 6-point
    /// interval rule in ln t, cumulative from the outside).
    std::vector<double> residual_outer(double w) const {
        const std::size_t n = radii.size();
        std::vector<double> F(n);
        for (std::size_t i = 0; i < n; ++i)
            F[i] = std::pow(radii[i], w + 1.0) * resid[i];  // dt = t d(ln t)
        std::vector<double> out(n, 0.0);
        for (std::size_t i = n - 1; i-- > 0;) {
            const long j0 = std::clamp<long>(long(i) - 2, 0, long(n) - 6);
            std::array<int, 6> off;
            for (int m = 0; m < 6; ++m) off[m] = int(j0 + m - long(i));
            const auto wts = interval_weights(off);
            double seg = 0.0;
            for (int m = 0; m < 6; ++m) seg += wts[m] * F[j0 + m];
            out[i] = out[i + 1] + h * seg;
        }
        return out;
    }

    /// integral_{r}^{infinity} t^w b(t) dt at every ladder node.
    std::vector<double> outer_integral(double w) const {
        if (!(w - k1 < -1.0))
            throw TailDivergence("tail integral diverges: exponent " +
                                 std::to_string(w - k1));
        auto out = residual_outer(w);
        for (std::size_t i = 0; i < radii.size(); ++i)
            out[i] += c_tail * powerlog_tail_integral(w - k1, k2, radii[i]);
        return out;
    }

    /// integral_{r_base}^{r} t^w b(t) dt at every node (r_base = innermost).
    std::vector<double> inner_integral(double w) const {
        auto res = residual_outer(w);
        const std::size_t n = radii.size();
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (res[0] - res[i]) +
                     c_tail * powerlog_integral(w - k1, k2, radii[0], radii[i]);
        return out;
    }
};

}  // namespace

// ---- rings ----

void RingSamples::validate() const {
    if (thetas.size() < 8 || thetas.size() % 2 != 0)
        throw Error("RingSamples: n_theta must be even and >= 8");
    for (std::size_t i = 0; i < thetas.size(); ++i)
        if (std::abs(thetas[i] - 2.0 * kPi * i / thetas.size()) > 1e-12)
            throw Error("RingSamples: theta grid must be uniform from 0");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] < radii[i + 1]))
            throw Error("RingSamples: radii must be strictly increasing");
}

std::string RingSamples::to_csv() const {
    std::ostringstream os;
    os << "r,theta";
    for (std::size_t c = 0; c < comps.size(); ++c) os << ",value" << c;
    os << "\n";
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            os << format_g17(radii[i]) << "," << format_g17(thetas[j]);
            for (const auto& c : comps) os << "," << format_g17(c[i][j]);
            os << "\n";
        }
    return os.str();
}

RingSamples RingSamples::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw IoFailure("empty CSV");
    const std::size_t ncomp = std::count(line.begin(), line.end(), ',') - 1;
    RingSamples rs;
    rs.comps.resize(ncomp);
    std::vector<double> row;
    std::size_t ring = SIZE_MAX;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        row.clear();
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != ncomp + 2) throw IoFailure("bad CSV row");
        if (rs.radii.empty() || row[0] != rs.radii.back()) {
            rs.radii.push_back(row[0]);
            for (auto& c : rs.comps) c.emplace_back();
            ++ring;
        }
        if (ring == 0) rs.thetas.push_back(row[1]);
        for (std::size_t c = 0; c < ncomp; ++c) rs.comps[c][ring].push_back(row[2 + c]);
    }
    rs.kind = ncomp == 1 ? RingKind::scalar
                         : (ncomp == 2 ? RingKind::gradient : RingKind::hessian);
    return rs;
}

std::vector<double> uniform_angles(int n_theta) {
    std::vector<double> th(n_theta);
    for (int j = 0; j < n_theta; ++j) th[j] = 2.0 * kPi * j / n_theta;
    return th;
}

std::vector<double> geometric_ladder(double r_min, double r_max, int n_rings) {
    if (!(r_min > 0.0 && r_max > r_min && n_rings >= 2))
        throw Error("geometric_ladder: need 0 < r_min < r_max, n_rings >= 2");
    std::vector<double> r(n_rings);
    for (int i = 0; i < n_rings; ++i)
        r[i] = r_min * std::pow(r_max / r_min, double(i) / (n_rings - 1));
    r.back() = r_max;
    return r;
}

// ---- harmonics ----

std::vector<ModeSeries> project_modes(const RingSamples& rings, int kmax) {
    rings.validate();
    if (rings.kind != RingKind::scalar)
        throw Error("project_modes expects scalar samples");
    const int n = int(rings.n_theta());
    if (kmax >= n / 2) throw Aliasing("kmax must be < n_theta/2");
    const auto& vals = rings.scalar();
    const std::size_t nr = rings.n_radii();
    std::vector<ModeSeries> out;
    for (int k = 0; k <= kmax; ++k) {
        for (int m = 1; m <= (k == 0 ? 1 : 2); ++m) {
            ModeSeries s{k, m, std::vector<double>(nr, 0.0)};
            const double norm = (k == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
            for (std::size_t i = 0; i < nr; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double y = (m == 1) ? std::cos(k * rings.thetas[j])
                                              : std::sin(k * rings.thetas[j]);
                    acc += vals[i][j] * y;
                }
                s.coeffs[i] = acc * norm * 2.0 * kPi / n;
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

ModeSeries solve_mode0(const ModeSeries& b, const std::vector<double>& radii,
                       const TailModel& tail) {
    if (!(tail.k1 > 2.0)) throw TailDivergence("mode 0 requires k1 > 2");
    ModeIntegrator mi(radii, b.coeffs, tail);
    // a0(r) = int_r^inf t ln t b dt - ln r * int_r^inf t b dt
    const auto jlog = [&] {
        // integral of t ln t b: model part needs the (ln t)^{k2+1} family
        std::vector<double> out = mi.residual_outer(1.0);
        // residual part must also carry the extra ln t weight; redo directly
        const std::size_t n = radii.size();
        std::vector<double> F(n);
        for (std::size_t i = 0; i < n; ++i)
            F[i] = std::pow(radii[i], 2.0) * std::log(radii[i]) * mi.resid[i];
        std::vector<double> acc(n, 0.0);
        const double h = std::log(radii[1] / radii[0]);
        for (std::size_t i = n - 1; i-- > 0;) {
            const long j0 = std::clamp<long>(long(i) - 2, 0, long(n) - 6);
            std::array<int, 6> off;
            for (int m = 0; m < 6; ++m) off[m] = int(j0 + m - long(i));
            const auto wts = interval_weights(off);
            double seg = 0.0;
            for (int m = 0; m < 6; ++m) seg += wts[m] * F[j0 + m];
            acc[i] = acc[i + 1] + h * seg;
        }
        if (!(1.0 - tail.k1 < -1.0)) throw TailDivergence("mode 0 tail diverges");
        for (std::size_t i = 0; i < n; ++i)
            acc[i] += mi.c_tail * powerlog_tail_integral(1.0 - tail.k1, mi.k2 + 1, radii[i]);
        return acc;
    }();
    const auto jplain = mi.outer_integral(1.0);
    ModeSeries a{0, 1, std::vector<double>(radii.size())};
    for (std::size_t i = 0; i < radii.size(); ++i)
        a.coeffs[i] = jlog[i] - std::log(radii[i]) * jplain[i];
    return a;
}

ModeSeries solve_modek(int k, const ModeSeries& b, const std::vector<double>& radii,
                       const TailModel& tail) {
    if (k < 1) throw Error("solve_modek requires k >= 1");
    if (!(tail.k1 > 2.0)) throw TailDivergence("mode solver requires k1 > 2");
    ModeIntegrator mi(radii, b.coeffs, tail);
    // Sign convention fixed by the ODE residual (variation of parameters with
    // Wronskian -2k/r):
    //   a(r) = -(1/2k) r^k int_r^inf t^{1-k} b dt  - (1/2k) r^{-k} J(r),
    // J(r) = int_base^r t^{1+k} b dt with base = infinity for k < k1-2
    // (giving -int_r^inf) and base = innermost radius otherwise.
    const auto grow = mi.outer_integral(1.0 - k);
    const bool tails = (k < tail.k1 - 2.0);
    std::vector<double> J;
    if (tails) {
        J = mi.outer_integral(1.0 + k);
        for (auto& v : J) v = -v;
    } else {
        J = mi.inner_integral(1.0 + k);
    }
    ModeSeries a{k, b.m, std::vector<double>(radii.size())};
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        a.coeffs[i] = -(0.5 / k) * std::pow(r, k) * grow[i] -
                      (0.5 / k) * std::pow(r, -k) * J[i];
    }
    return a;
}

double powerlog_tail_integral(double p, int m, double r) {
    if (!(p < -1.0)) throw TailDivergence("powerlog_tail_integral requires p < -1");
    double sum = 0.0, c = -1.0 / (p + 1.0);
    for (int j = 0; j <= m; ++j) {
        sum += c * std::pow(std::log(r), m - j);
        c *= -(double(m - j)) / (p + 1.0);
    }
    return std::pow(r, p + 1.0) * sum;
}

std::vector<double> cumulative_outer_integral(const std::vector<double>& radii,
                                              const std::vector<double>& f) {
    const double h = ln_step(radii);
    const std::size_t n = radii.size();
    if (n < 6) throw Error("cumulative_outer_integral: need >= 6 nodes");
    std::vector<double> F(n), out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) F[i] = f[i] * radii[i];
    for (std::size_t i = n - 1; i-- > 0;) {
        const long j0 = std::clamp<long>(long(i) - 2, 0, long(n) - 6);
        std::array<int, 6> off;
        for (int m = 0; m < 6; ++m) off[m] = int(j0 + m - long(i));
        const auto wts = interval_weights(off);
        double seg = 0.0;
        for (int m = 0; m < 6; ++m) seg += wts[m] * F[j0 + m];
        out[i] = out[i + 1] + h * seg;
    }
    return out;
}

SlopeFit decay_slope(const std::vector<double>& radii,
                     const std::vector<double>& sups, bool with_log_correction) {
    const std::size_t n = radii.size();
    if (n < 6 || sups.size() != n) throw InsufficientRings("need >= 6 rings");
    if (!(radii.back() / radii.front() >= 99.0))
        throw InsufficientRings("rings must span >= 2 decades");
    const int p = with_log_correction ? 3 : 2;
    // normal equations for [1, ln r, (ln ln r)]
    std::vector<std::array<double, 3>> X(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        X[i] = {1.0, std::log(radii[i]),
                with_log_correction ? std::log(std::log(radii[i])) : 0.0};
        y[i] = std::log(std::max(sups[i], 1e-300));
    }
    double ata[3][3] = {}, aty[3] = {};
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a) {
            aty[a] += X[i][a] * y[i];
            for (int bcol = 0; bcol < p; ++bcol) ata[a][bcol] += X[i][a] * X[i][bcol];
        }
    // solve p x p with inverse for the covariance diagonal
    double m[3][6] = {};
    for (int a = 0; a < p; ++a) {
        for (int bcol = 0; bcol < p; ++bcol) m[a][bcol] = ata[a][bcol];
        m[a][p + a] = 1.0;
    }
    for (int c = 0; c < p; ++c) {
        int piv = c;
        for (int rr = c + 1; rr < p; ++rr)
            if (std::abs(m[rr][c]) > std::abs(m[piv][c])) piv = rr;
        std::swap(m[c], m[piv]);
        for (int rr = 0; rr < p; ++rr) {
            if (rr == c) continue;
            const double f = m[rr][c] / m[c][c];
            for (int j = 0; j < 2 * p; ++j) m[rr][j] -= f * m[c][j];
        }
    }
    double inv[3][3], coef[3] = {};
    for (int a = 0; a < p; ++a)
        for (int bcol = 0; bcol < p; ++bcol) inv[a][bcol] = m[a][p + bcol] / m[a][a];
    for (int a = 0; a < p; ++a)
        for (int bcol = 0; bcol < p; ++bcol) coef[a] += inv[a][bcol] * aty[bcol];
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (int a = 0; a < p; ++a) fit += coef[a] * X[i][a];
        ss += (y[i] - fit) * (y[i] - fit);
    }
    const double sigma2 = ss / std::max<std::size_t>(1, n - p);
    SlopeFit out{coef[1], std::sqrt(sigma2 * inv[1][1]),
                 with_log_correction ? coef[2] : 0.0};
    return out;
}

PoissonResult poisson_solve(const RingSamples& g, double k1, double k2, int kmax) {
    g.validate();
    if (!(k1 > 2.0)) throw TailDivergence("poisson_solve requires k1 > 2");
    auto modes_b = project_modes(g, kmax);
    const TailModel tail{k1, k2};
    PoissonResult out;
    out.modes.reserve(modes_b.size());
    for (const auto& b : modes_b) {
        if (b.k == 0)
            out.modes.push_back(solve_mode0(b, g.radii, tail));
        else
            out.modes.push_back(solve_modek(b.k, b, g.radii, tail));
    }
    // assemble v on the same grid
    out.v.radii = g.radii;
    out.v.thetas = g.thetas;
    out.v.kind = RingKind::scalar;
    out.v.comps.assign(1, std::vector<std::vector<double>>(
                              g.n_radii(), std::vector<double>(g.n_theta(), 0.0)));
    for (const auto& a : out.modes) {
        const double norm = (a.k == 0) ? 1.0 / std::sqrt(2.0 * kPi) : 1.0 / std::sqrt(kPi);
        for (std::size_t i = 0; i < g.n_radii(); ++i)
            for (std::size_t j = 0; j < g.n_theta(); ++j) {
                const double y = (a.m == 1) ? std::cos(a.k * g.thetas[j])
                                            : std::sin(a.k * g.thetas[j]);
                out.v.comps[0][i][j] += a.coeffs[i] * y * norm;
            }
    }
    // decay certificate
    out.cert.k1 = k1;
    out.cert.k2 = k2;
    std::vector<double> sups(g.n_radii());
    for (std::size_t i = 0; i < g.n_radii(); ++i) {
        double s = 0.0;
        for (double v : out.v.comps[0][i]) s = std::max(s, std::abs(v));
        sups[i] = s;
        out.cert.sup_abs = std::max(out.cert.sup_abs, s);
        const double env = std::pow(g.radii[i], 2.0 - k1) *
                           std::pow(std::log(g.radii[i]), k2 + 1.0);
        out.cert.sup_ratio = std::max(out.cert.sup_ratio, s / env);
    }
    try {
        const auto sf = decay_slope(g.radii, sups);
        out.cert.slope_estimate = sf.slope;
        out.cert.slope_ci = sf.ci;
    } catch (const InsufficientRings&) {
        out.cert.slope_estimate = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace mgg
