#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "limitlab/koenigs.hpp"
#include "limitlab/rational.hpp"
#include "limitlab/rng.hpp"
#include "limitlab/roots.hpp"

namespace limitlab {

/// Parameters of the Henon family H_{p,a}(x,y) = (p(x) - a y, x); the Jacobian
/// determinant is a everywhere.
struct HenonParams {
    Polynomial p;
    cpx a{0.0, 0.0};
    double a_max = 0.05;

    void validate() const {
        p.require_dynamical("HenonParams");
        if (std::abs(a) > a_max + 1e-15)
            throw std::invalid_argument("HenonParams: |a| exceeds the small-Jacobian cap");
    }
};

using C2 = std::pair<cpx, cpx>;

inline C2 henon(const HenonParams& h, const C2& pt) {
    return {h.p.eval(pt.first) - h.a * pt.second, pt.first};
}

/// inverse exists when a != 0: x = y', y = (p(y') - x') / a
inline C2 henon_inverse(const HenonParams& h, const C2& pt) {
    if (h.a == cpx(0.0, 0.0)) throw std::invalid_argument("henon_inverse: map is not invertible at a=0");
    return {pt.second, (h.p.eval(pt.second) - pt.first) / h.a};
}

struct HenonFixedPoint {
    C2 point;
    cpx eig1, eig2;
    enum class Kind { Attracting, Saddle, Repelling, Neutral } kind = Kind::Neutral;
};

/// Fixed points solve x = p(x) - a x on the diagonal y = x; eigenvalues from
/// the 2x2 Jacobian [[p'(x), -a], [1, 0]].
inline std::vector<HenonFixedPoint> henon_fixed_points(const HenonParams& h) {
    std::vector<cpx> q = h.p.coefficients();
    if (q.size() < 2) q.resize(2, cpx(0.0, 0.0));
    q[1] -= (1.0 + h.a);
    std::vector<HenonFixedPoint> out;
    for (const cpx& x : roots_of(Polynomial(std::move(q)))) {
        HenonFixedPoint f;
        f.point = {x, x};
        cpx tr = h.p.derivative().eval(x);
        cpx disc = std::sqrt(tr * tr - 4.0 * h.a);
        f.eig1 = 0.5 * (tr + disc);
        f.eig2 = 0.5 * (tr - disc);
        double m1 = std::abs(f.eig1), m2 = std::abs(f.eig2);
        if (m1 < 1.0 - 1e-12 && m2 < 1.0 - 1e-12) f.kind = HenonFixedPoint::Kind::Attracting;
        else if (m1 > 1.0 + 1e-12 && m2 > 1.0 + 1e-12) f.kind = HenonFixedPoint::Kind::Repelling;
        else if ((m1 - 1.0) * (m2 - 1.0) < 0.0) f.kind = HenonFixedPoint::Kind::Saddle;
        out.push_back(f);
    }
    return out;
}

struct HenonOrbitClass {
    enum class Kind { Escaped, Bounded, Converged } kind = Kind::Bounded;
    int steps = 0;
    int fixed_point = -1;   ///< index into the attracting fixed point list
};

/// Escape / convergence trichotomy for one seed. Bounded means the budget ran
/// out without a verdict.
inline HenonOrbitClass classify_henon_orbit(const HenonParams& h, C2 pt, double r_escape, int budget,
                                            const std::vector<HenonFixedPoint>& fps,
                                            double conv_tol = 1e-8) {
    HenonOrbitClass oc;
    for (int n = 0; n <= budget; ++n) {
        for (std::size_t i = 0; i < fps.size(); ++i) {
            if (fps[i].kind != HenonFixedPoint::Kind::Attracting) continue;
            double d = std::abs(pt.first - fps[i].point.first) +
                       std::abs(pt.second - fps[i].point.second);
            if (d <= conv_tol) {
                oc.kind = HenonOrbitClass::Kind::Converged;
                oc.steps = n;
                oc.fixed_point = static_cast<int>(i);
                return oc;
            }
        }
        if (std::max(std::abs(pt.first), std::abs(pt.second)) > r_escape) {
            oc.kind = HenonOrbitClass::Kind::Escaped;
            oc.steps = n;
            return oc;
        }
        if (n == budget) break;
        pt = henon(h, pt);
    }
    oc.steps = budget;
    return oc;
}

inline double henon_escape_radius(const HenonParams& h) {
    return 2.0 * (1.0 + std::abs(h.a) + h.p.coefficient_bound());
}

// ---- solid-torus model maps ----

/// Point of the solid torus S^1 x D_rho: |zeta| = 1, |z| <= rho.
struct TorusPoint {
    cpx zeta{1.0, 0.0};
    cpx z{0.0, 0.0};
};

inline void check_torus_point(const TorusPoint& pt, double rho) {
    if (std::abs(std::abs(pt.zeta) - 1.0) > 1e-12)
        throw std::invalid_argument("TorusPoint: |zeta| must be 1");
    if (std::abs(pt.z) > rho + 1e-12) throw std::invalid_argument("TorusPoint: |z| > rho");
}

/// admissibility of alpha for fiber radius rho: image must nest strictly
inline bool nesting_holds(double alpha_mag, double rho) { return 1.0 + alpha_mag * rho < rho; }

/// f_{p0}(zeta, z) = (zeta^d, zeta - alpha z / zeta^(d-1))
inline TorusPoint f_solid_torus(int d, cpx alpha, const TorusPoint& pt) {
    TorusPoint out;
    out.zeta = std::pow(pt.zeta, d);
    cpx denom = std::pow(pt.zeta, d - 1);
    out.z = pt.zeta - alpha * pt.z / denom;
    return out;
}

/// f_gamma(zeta, z) = (zeta^k, gamma(zeta) - alpha z / p'(gamma(zeta)));
/// gamma is interpolated from its sample table.
inline TorusPoint f_gamma(int k, cpx alpha, const ClosedCurve& gamma, const Polynomial& p,
                          const TorusPoint& pt) {
    double theta = std::arg(pt.zeta) / (2.0 * M_PI);
    cpx g = gamma.at_param(theta);
    cpx dp = p.derivative().eval(g);
    if (std::abs(dp) < 1e-6)
        throw std::domain_error("f_gamma: p' vanishes on the boundary curve (not hyperbolic enough)");
    TorusPoint out;
    out.zeta = std::pow(pt.zeta, k);
    out.z = g - alpha * pt.z / dp;
    return out;
}

/// Affine bound |z'| <= c_term + a_term |z| of a solid-torus map; for the
/// model map c = 1, a = |alpha|, for f_gamma c = max|gamma|,
/// a = |alpha| / min|p'(gamma)|.
struct FiberEnvelope {
    double c_term = 1.0;
    double a_term = 0.1;

    double apply(double r) const { return c_term + a_term * r; }
    double limit() const { return c_term / (1.0 - a_term); }
    bool nests(double rho) const { return a_term < 1.0 && apply(rho) < rho; }
};

struct TorusDiagnostics {
    double nesting_margin = 0.0;     ///< rho - sup |z'| over samples
    int winding = 0;                 ///< lifted degree of the first coordinate
    bool injective = true;
    std::vector<std::pair<TorusPoint, TorusPoint>> collisions;
    bool clouds_monotone = true;     ///< every cloud inside the shrinking envelope
    std::vector<double> envelope;    ///< exact nested bounds B_{k+1} = c + a B_k
    std::vector<double> cloud_radius;///< observed sup |z| per iteration
    std::vector<double> decay;       ///< envelope excess decay ratio, = a_term under nesting
};

/// Desk verification of the solid-torus hypotheses: strict nesting of the
/// image, winding number of the first coordinate, injectivity over a sample
/// cloud, and monotone shrinking of iterated image clouds. Fibers of the
/// iterated image converge to the attractor's Cantor sections, not points, so
/// the Hausdorff proxy is the exact envelope tube |z| <= B_k with
/// B_{k+1} = c + a B_k: the tubes are nested whenever the map nests, every
/// sampled cloud must sit inside its tube (1e-6 slack), and the tube excess
/// over the limit radius decays by the fiber contraction a each step.
inline TorusDiagnostics torus_diagnostics(const std::function<TorusPoint(const TorusPoint&)>& map,
                                          const FiberEnvelope& env, double rho, int samples,
                                          int iterations, std::uint64_t seed = 11,
                                          const std::vector<TorusPoint>& extra_probes = {}) {
    TorusDiagnostics diag;
    Rng rng(seed);

    std::vector<TorusPoint> cloud;
    cloud.reserve(static_cast<std::size_t>(samples) + extra_probes.size());
    for (int i = 0; i < samples; ++i) {
        TorusPoint pt;
        pt.zeta = rng.on_circle();
        pt.z = rng.in_disk(rho);
        cloud.push_back(pt);
    }
    for (const TorusPoint& pt : extra_probes) cloud.push_back(pt);

    // nesting and injectivity on one application
    std::vector<TorusPoint> image(cloud.size());
    double sup_z = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        image[i] = map(cloud[i]);
        sup_z = std::max(sup_z, std::abs(image[i].z));
    }
    diag.nesting_margin = rho - sup_z;

    // collisions: identical first coordinates force equal zeta^d, so sort by
    // image angle and compare close pairs
    std::vector<std::size_t> order(cloud.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::arg(image[a].zeta) < std::arg(image[b].zeta);
    });
    auto tdist = [](const TorusPoint& a, const TorusPoint& b) {
        return std::abs(a.zeta - b.zeta) + std::abs(a.z - b.z);
    };
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            double dang = std::abs(std::arg(image[order[j]].zeta) - std::arg(image[order[i]].zeta));
            if (dang > 1e-7) break;
            if (tdist(image[order[i]], image[order[j]]) < 1e-9 &&
                tdist(cloud[order[i]], cloud[order[j]]) > 1e-7) {
                diag.injective = false;
                diag.collisions.emplace_back(cloud[order[i]], cloud[order[j]]);
            }
        }
    }

    // winding of the first coordinate via a continuous angle lift
    {
        const int S = 1 << 12;
        double lift = 0.0, prev = 0.0;
        for (int j = 0; j <= S; ++j) {
            TorusPoint pt;
            pt.zeta = std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) / S);
            pt.z = 0.0;
            double ang = std::arg(map(pt).zeta);
            if (j == 0) {
                prev = ang;
            } else {
                double d = ang - prev;
                while (d > M_PI) d -= 2.0 * M_PI;
                while (d < -M_PI) d += 2.0 * M_PI;
                lift += d;
                prev = ang;
            }
        }
        diag.winding = static_cast<int>(std::lround(lift / (2.0 * M_PI)));
    }

    // iterated image clouds inside the exact envelope tubes
    std::vector<TorusPoint> current = cloud;
    double bound = rho;
    diag.envelope.push_back(bound);
    diag.cloud_radius.push_back(rho);
    for (int it = 0; it < iterations; ++it) {
        for (TorusPoint& pt : current) pt = map(pt);
        double next_bound = env.apply(bound);
        if (next_bound > bound + 1e-12) diag.clouds_monotone = false;
        double sup = 0.0;
        for (const TorusPoint& pt : current) sup = std::max(sup, std::abs(pt.z));
        if (sup > next_bound + 1e-6) diag.clouds_monotone = false;
        bound = next_bound;
        diag.envelope.push_back(bound);
        diag.cloud_radius.push_back(sup);
    }
    for (std::size_t k = 0; k + 2 < diag.envelope.size(); ++k) {
        double d0 = diag.envelope[k] - diag.envelope[k + 1];
        double d1 = diag.envelope[k + 1] - diag.envelope[k + 2];
        diag.decay.push_back(d0 > 1e-15 ? d1 / d0 : 0.0);
    }
    return diag;
}

// ---- accessible boundary ----

struct BoundaryCertificate {
    bool bounded = false;        ///< forward orbit stayed in the escape radius
    bool avoids_fixed_ball = false;   ///< never entered the 1e-3 ball of z(a)
    bool x_accumulates_on_boundary = false;
    double worst_x_distance = 0.0;    ///< max distance of tail x's to the 1-D boundary
    bool pass() const { return bounded && avoids_fixed_ball && x_accumulates_on_boundary; }
};

struct BoundaryProbe {
    int direction = 0;
    double theta = 0.0;
    double t = 0.0;            ///< boundary parameter along the ray
    C2 point;
    bool flagged = false;      ///< ray never left the basin
    BoundaryCertificate cert;
};

/// The orbit budget is capped by shadowing: the bisection pins the boundary
/// parameter to ~1e-16 relative, and the unstable expansion (~1.9 per step)
/// eats that in just under 50 steps, after which the orbit leaves J+.
struct AccessibleBoundaryOptions {
    int directions = 64;
    int refine_steps = 52;
    int orbit_budget = 45;
    int tail_window = 12;
    double march_start = 0.01;
    double march_growth = 1.3;
    double march_cap = 50.0;
    double fixed_ball = 1e-3;
    double x_tol = 5e-2;
    int classify_budget = 2000;
};

/// distance from x to the sampled boundary polyline
inline double distance_to_curve(const ClosedCurve& curve, cpx x) {
    double best = 1e300;
    int m = curve.size();
    for (int j = 0; j < m; ++j) {
        cpx a = curve.at_index(j), b = curve.at_index(j + 1);
        cpx ab = b - a;
        double len2 = std::norm(ab);
        double s = len2 > 0.0 ? std::clamp(((x - a) * std::conj(ab)).real() / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, std::abs(x - (a + s * ab)));
    }
    return best;
}

/// Probe the accessible boundary of the basin of z(a): bisect along diagonal
/// rays from the fixed point for the last parameter in the basin, then
/// certify the limit point (bounded orbit, stays away from z(a), x-orbit tail
/// accumulates on the 1-D component boundary).
inline std::vector<BoundaryProbe> accessible_boundary_sample(const HenonParams& h,
                                                             const ClosedCurve& boundary_1d,
                                                             const AccessibleBoundaryOptions& opt = {}) {
    h.validate();
    auto fps = henon_fixed_points(h);
    int attracting = -1;
    for (std::size_t i = 0; i < fps.size(); ++i)
        if (fps[i].kind == HenonFixedPoint::Kind::Attracting) attracting = static_cast<int>(i);
    if (attracting < 0)
        throw std::invalid_argument("accessible_boundary_sample: no attracting fixed point");
    const C2 star = fps[static_cast<std::size_t>(attracting)].point;
    const double R = henon_escape_radius(h);

    std::vector<BoundaryProbe> probes(static_cast<std::size_t>(opt.directions));
    parallel_for(static_cast<std::size_t>(opt.directions), [&](std::size_t j) {
        BoundaryProbe& probe = probes[j];
        probe.direction = static_cast<int>(j);
        probe.theta = 2.0 * M_PI * static_cast<double>(j) / opt.directions;
        cpx u = std::polar(1.0, probe.theta);
        auto at = [&](double t) -> C2 { return {star.first + t * u, star.second + t * u}; };
        auto in_basin = [&](double t) {
            return classify_henon_orbit(h, at(t), R, opt.classify_budget, fps).kind ==
                   HenonOrbitClass::Kind::Converged;
        };

        double lo = 0.0, hi = -1.0;
        for (double t = opt.march_start; t <= opt.march_cap; t *= opt.march_growth) {
            if (in_basin(t)) {
                lo = t;
            } else {
                hi = t;
                break;
            }
        }
        if (hi < 0.0) {
            probe.flagged = true;
            return;
        }
        for (int step = 0; step < opt.refine_steps; ++step) {
            double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (in_basin(mid) ? lo : hi) = mid;
        }
        probe.t = 0.5 * (lo + hi);
        probe.point = at(probe.t);

        // certificate
        C2 pt = probe.point;
        std::vector<cpx> xs;
        bool bounded = true, avoids = true;
        for (int n = 0; n < opt.orbit_budget; ++n) {
            if (std::max(std::abs(pt.first), std::abs(pt.second)) > R) {
                bounded = false;
                break;
            }
            double dstar = std::abs(pt.first - star.first) + std::abs(pt.second - star.second);
            if (dstar < opt.fixed_ball) avoids = false;
            xs.push_back(pt.first);
            pt = henon(h, pt);
        }
        probe.cert.bounded = bounded;
        probe.cert.avoids_fixed_ball = avoids;
        int window = std::min<int>(opt.tail_window, static_cast<int>(xs.size()));
        double worst = 0.0;
        for (int n = static_cast<int>(xs.size()) - window; n < static_cast<int>(xs.size()); ++n)
            worst = std::max(worst, distance_to_curve(boundary_1d, xs[static_cast<std::size_t>(n)]));
        probe.cert.worst_x_distance = worst;
        probe.cert.x_accumulates_on_boundary = (window > 0) && worst <= opt.x_tol;
    });
    return probes;
}

// ---- the 1-D calibration example ----

struct CantorEndpoint {
    Rational value;
    Rational interval_lo, interval_hi;   ///< the removed middle third it bounds
};

/// Endpoints of the removed middle-third intervals after k stages of the
/// standard Cantor construction: exactly the accessible boundary of the
/// complement, 2^(k+1) - 2 points.
inline std::vector<CantorEndpoint> cantor_accessible(int k) {
    if (k < 1) throw std::invalid_argument("cantor_accessible: k >= 1");
    std::vector<std::pair<Rational, Rational>> kept{{Rational(0), Rational(1)}};
    std::vector<CantorEndpoint> out;
    for (int stage = 1; stage <= k; ++stage) {
        std::vector<std::pair<Rational, Rational>> next;
        next.reserve(kept.size() * 2);
        for (const auto& [a, b] : kept) {
            Rational third = (b - a) / Rational(3);
            Rational l = a + third, r = b - third;
            out.push_back({l, l, r});
            out.push_back({r, l, r});
            next.emplace_back(a, l);
            next.emplace_back(r, b);
        }
        kept = std::move(next);
    }
    return out;
}

} // namespace limitlab
