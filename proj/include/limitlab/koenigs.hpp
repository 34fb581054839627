#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "limitlab/curves.hpp"
#include "limitlab/fatou.hpp"
#include "limitlab/roots.hpp"

namespace limitlab {

struct LinearizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CurveError : std::runtime_error {
    CurveError(const std::string& msg, double residual_) : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

/// Linearization data at an attracting fixed point.
struct FixedPointFrame {
    cpx z_star;
    cpx lambda;          ///< p'(z_star)
    bool superattracting = false;
    cpx monomial_scale{1.0, 0.0};   ///< c with p(z*+w) = z* + c w^d, when superattracting
};

inline FixedPointFrame fixed_point_frame(const Polynomial& p, cpx z_star) {
    if (std::abs(p.eval(z_star) - z_star) > 1e-9 * std::max(1.0, std::abs(z_star)))
        throw std::invalid_argument("fixed_point_frame: not a fixed point");
    FixedPointFrame f;
    f.z_star = z_star;
    f.lambda = p.derivative().eval(z_star);
    if (std::abs(f.lambda) >= 1.0)
        throw std::invalid_argument("fixed_point_frame: fixed point is not attracting");
    if (std::abs(f.lambda) < 1e-12) {
        f.superattracting = true;
        // Taylor shift: q(w) = p(z* + w) - z*; we only handle the monomial case
        // q(w) = c w^d, where the Boettcher coordinate is the exact scaling.
        const auto& a = p.coefficients();
        int d = p.degree();
        std::vector<cpx> q(a.size(), cpx(0.0, 0.0));
        for (int i = 0; i <= d; ++i) {
            // a_i (z* + w)^i contributes a_i C(i,j) z*^(i-j) to q[j]
            cpx binom = 1.0;
            for (int j = 0; j <= i; ++j) {
                cpx zpow = 1.0;
                for (int t = 0; t < i - j; ++t) zpow *= z_star;
                q[static_cast<std::size_t>(j)] += a[static_cast<std::size_t>(i)] * binom * zpow;
                binom *= static_cast<double>(i - j) / (j + 1.0);
            }
        }
        q[0] -= z_star;
        double scale = 0.0;
        for (const cpx& qi : q) scale = std::max(scale, std::abs(qi));
        for (int j = 0; j < d; ++j)
            if (std::abs(q[static_cast<std::size_t>(j)]) > 1e-12 * std::max(1.0, scale))
                throw LinearizationError(
                    "superattracting fixed point is not monomial; Boettcher fallback unavailable");
        f.monomial_scale = q[static_cast<std::size_t>(d)];
    }
    return f;
}

/// Koenigs coordinate phi(x) = lim lambda^{-n} (p^n(x) - z*), normalized so
/// phi'(z*) = 1. Defined on the whole basin by following the orbit in.
inline cpx koenigs_phi(const Polynomial& p, const FixedPointFrame& f, cpx x, int max_iter = 400) {
    if (f.superattracting) {
        // exact Boettcher scaling for the monomial case
        int d = p.degree();
        cpx root = std::pow(f.monomial_scale, 1.0 / (d - 1));
        return root * (x - f.z_star);
    }
    cpx z = x;
    cpx lam_pow = 1.0;
    cpx prev(0.0, 0.0), best(0.0, 0.0);
    double best_diff = 1e300;
    for (int n = 0; n < max_iter; ++n) {
        cpx u = (z - f.z_star) / lam_pow;
        if (n > 0) {
            double diff = std::abs(u - prev);
            // clean convergence; the consistency clause rejects the artifact
            // u = 0 plateau that appears when the orbit locks bit-exactly
            // onto z_star and z - z_star underflows
            if (diff <= 1e-14 * (1.0 + std::abs(u)) &&
                std::abs(u - best) <= 1e-6 * (1.0 + std::abs(best)))
                return u;
            if (diff < best_diff) {
                best_diff = diff;
                best = u;
            } else if (diff > 4.0 * best_diff && best_diff <= 1e-7 * (1.0 + std::abs(best))) {
                // a geometric Cauchy tail never rebounds 4x above its running
                // minimum; once it does after reaching 1e-7 quality, the rest
                // is rounding noise amplified by 1/lambda each step
                return best;
            }
        }
        prev = u;
        z = p.eval(z);
        lam_pow *= f.lambda;
        if (std::abs(lam_pow) < 1e-280) return best;
    }
    if (!(std::abs(z - f.z_star) < 1e-6))
        throw LinearizationError("koenigs_phi: orbit did not settle at the fixed point");
    return best;
}

/// Inverse Koenigs map: seed z* + lambda^n u in the linear range, then walk
/// back out along the inverse branch fixing z* (p contracts toward z*, so
/// the n expansion steps are preimage choices, predicted to first order).
inline cpx koenigs_inverse(const Polynomial& p, const FixedPointFrame& f, cpx u) {
    if (f.superattracting) {
        int d = p.degree();
        cpx root = std::pow(f.monomial_scale, 1.0 / (d - 1));
        return f.z_star + u / root;
    }
    double absl = std::abs(f.lambda);
    int n = 0;
    cpx seed_scale = 1.0;
    double mag = std::abs(u);
    while (mag > 1e-8 && n < 900) {
        mag *= absl;
        seed_scale *= f.lambda;
        ++n;
    }
    cpx w = f.z_star + seed_scale * u;
    for (int i = 0; i < n; ++i) {
        cpx predicted = f.z_star + (w - f.z_star) / f.lambda;
        cpx best{};
        double best_d = 1e300;
        for (const cpx& cand : preimages(p, w)) {
            double d = std::abs(cand - predicted);
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
        w = best;
    }
    return w;
}

struct EquipotentialResult {
    ClosedCurve curve;
    double level = 0.0;      ///< level actually used after auto-raise
    bool adjusted = false;   ///< true when the requested level was moved
    FixedPointFrame frame;
};

/// Critical values of p whose orbits fall into the basin of z*, with the
/// matching |phi| magnitudes (value, critical point).
struct BasinCriticalData {
    double max_value_mag = 0.0;   ///< sup |phi(v)| over basin critical values
    double min_point_mag = 1e300; ///< inf |phi(c)| over basin critical points
    int count = 0;
};

inline BasinCriticalData basin_critical_data(const Polynomial& p, const FixedPointFrame& f,
                                             int budget = 2000) {
    BasinCriticalData out;
    for (const cpx& c0 : critical_points(p)) {
        cpx v = p.eval(c0);
        // does the critical value fall to z*?
        cpx z = v;
        bool converges = false;
        for (int it = 0; it < budget; ++it) {
            if (std::abs(z - f.z_star) < 1e-9) {
                converges = true;
                break;
            }
            if (std::abs(z) > p.escape_radius()) break;
            z = p.eval(z);
        }
        if (!converges) continue;
        ++out.count;
        if (std::abs(v - f.z_star) < 1e-13) continue;   // value at the fixed point: no constraint
        double mv = std::abs(koenigs_phi(p, f, v));
        out.max_value_mag = std::max(out.max_value_mag, mv);
        out.min_point_mag = std::min(out.min_point_mag, mv / std::abs(f.lambda));
    }
    return out;
}

/// Level curve {|phi| = s} around the attracting fixed point, traversed once,
/// with s auto-raised until every critical value of p in the basin is strictly
/// inside (and kept below the critical-point level so the curve stays Jordan).
inline EquipotentialResult equipotential(const Polynomial& p, cpx z_star, double s, int M = 4096) {
    p.require_dynamical("equipotential");
    EquipotentialResult res;
    res.frame = fixed_point_frame(p, z_star);
    double level = s;
    if (!res.frame.superattracting) {
        BasinCriticalData bc = basin_critical_data(p, res.frame);
        double lo = bc.max_value_mag * 1.05;
        double hi = bc.min_point_mag * 0.95;
        if (lo > 0.0 && lo >= hi)
            throw LinearizationError("equipotential: no Jordan level encloses all critical values");
        if (level < lo) {
            level = lo;
            res.adjusted = true;
        }
        if (level >= hi) {
            level = (lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * hi;
            res.adjusted = true;
        }
    }
    res.level = level;
    res.curve.samples.resize(static_cast<std::size_t>(M));
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t j) {
        cpx u = std::polar(level, 2.0 * M_PI * static_cast<double>(j) / M);
        res.curve.samples[j] = koenigs_inverse(p, res.frame, u);
    });
    if (res.curve.winding_about(z_star) != 1)
        throw LinearizationError("equipotential: curve does not wind once about the fixed point");
    return res;
}

struct BoundaryParametrization {
    ClosedCurve gamma;
    double residual = 0.0;   ///< max_theta |p(gamma(theta)) - gamma(k theta)|
    int levels = 0;
    int degree = 0;          ///< k
};

/// Degree of p on the immediate basin component of z*: 1 + number of critical
/// points attracted to z* (Riemann-Hurwitz on the component; desk cases have
/// connected basins so convergence is the membership test).
inline int basin_degree(const Polynomial& p, cpx z_star, int budget = 2000) {
    int k = 1;
    for (const cpx& c0 : critical_points(p)) {
        cpx z = c0;
        for (int it = 0; it < budget; ++it) {
            if (std::abs(z - z_star) < 1e-9) {
                ++k;
                break;
            }
            if (std::abs(z) > p.escape_radius()) break;
            z = p.eval(z);
        }
    }
    return k;
}

/// Boundary parametrization gamma with p(gamma(theta)) = gamma(k theta):
/// start from an equipotential and pull the parametrized curve back through
/// preimages, continuity-nearest root each time, converging outward to the
/// component boundary. rotation_class in [0, k-1) picks among the k-1
/// solutions by rotating the anchor angle.
inline BoundaryParametrization boundary_parametrization(const Polynomial& p, cpx z_star, int M = 4096,
                                                        int max_levels = 40, double settle_tol = 1e-9,
                                                        double residual_tol = 1e-3,
                                                        int rotation_class = 0) {
    p.require_dynamical("boundary_parametrization");
    if ((M & (M - 1)) != 0) throw std::invalid_argument("boundary_parametrization: M must be 2^m");
    const int k = basin_degree(p, z_star);
    if (k < 2)
        throw std::invalid_argument("boundary_parametrization: p must have degree >= 2 on the component");

    EquipotentialResult eq = equipotential(p, z_star, 0.25, M);
    ClosedCurve cur = eq.curve;
    if (rotation_class != 0) {
        // precompose with a fixed point of theta -> k theta (mod 1)
        double offset = static_cast<double>(rotation_class % (k - 1)) / (k - 1);
        ClosedCurve rotated;
        rotated.samples.resize(cur.samples.size());
        for (int j = 0; j < cur.size(); ++j)
            rotated.samples[static_cast<std::size_t>(j)] =
                cur.at_param(static_cast<double>(j) / M + offset);
        cur = std::move(rotated);
    }

    BoundaryParametrization out;
    out.degree = k;
    double change = 1e300;
    for (int level = 0; level < max_levels; ++level) {
        // the functional equation alone admits degenerate solutions (any
        // curve collapsed onto a fixed point satisfies it), so each pullback
        // marches the branch choice continuously and the winding is checked
        ClosedCurve next;
        next.samples.resize(static_cast<std::size_t>(M));
        for (int j = 0; j < M; ++j) {
            cpx target = cur.at_index(j * k);
            cpx anchor;
            if (j == 0) {
                cpx dir = cur.at_index(0) - z_star;
                anchor = z_star + dir * (1.0 + std::abs(dir));   // outward from angle 0
            } else if (j == 1) {
                anchor = next.samples[0];
            } else {
                anchor = 2.0 * next.samples[static_cast<std::size_t>(j - 1)] -
                         next.samples[static_cast<std::size_t>(j - 2)];
            }
            cpx best{};
            double best_d = 1e300;
            for (const cpx& w : preimages(p, target)) {
                double dd = std::abs(w - anchor);
                if (dd < best_d) {
                    best_d = dd;
                    best = w;
                }
            }
            next.samples[static_cast<std::size_t>(j)] = best;
        }
        if (next.winding_about(z_star) != 1)
            throw CurveError("boundary_parametrization: pullback lost the winding", 1e300);
        change = 0.0;
        for (int j = 0; j < M; ++j)
            change = std::max(change, std::abs(next.samples[static_cast<std::size_t>(j)] -
                                               cur.samples[static_cast<std::size_t>(j)]));
        cur = std::move(next);
        out.levels = level + 1;
        if (change <= settle_tol) break;
    }

    out.gamma = std::move(cur);
    for (int j = 0; j < M; ++j)
        out.residual = std::max(out.residual,
                                std::abs(p.eval(out.gamma.at_index(j)) - out.gamma.at_index(j * k)));
    if (change > settle_tol && out.residual > residual_tol)
        throw CurveError("boundary_parametrization: pullback tower did not settle", out.residual);
    if (out.residual > residual_tol)
        throw CurveError("boundary_parametrization: functional equation residual too large",
                         out.residual);
    if (out.gamma.winding_about(z_star) != 1)
        throw CurveError("boundary_parametrization: gamma does not wind once", out.residual);
    return out;
}

} // namespace limitlab
