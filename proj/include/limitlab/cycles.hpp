#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "limitlab/roots.hpp"

namespace limitlab {

/// An attracting cycle of p: the points in forward order and the multiplier
/// (product of p' over the cycle).
struct Cycle {
    std::vector<cpx> points;
    cpx multiplier{0.0, 0.0};

    int period() const { return static_cast<int>(points.size()); }

    /// worst |p(z_i) - z_{i+1}| over the cycle
    double residual(const Polynomial& p) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            cpx next = points[(i + 1) % points.size()];
            worst = std::max(worst, std::abs(p.eval(points[i]) - next));
        }
        return worst;
    }

    bool attracting() const { return std::abs(multiplier) < 1.0; }
};

/// set distance between two cycles, order-insensitive
inline double cycle_distance(const Cycle& a, const Cycle& b) {
    if (a.points.size() != b.points.size()) return 1e300;
    double worst = 0.0;
    for (const cpx& x : a.points) {
        double best = 1e300;
        for (const cpx& y : b.points) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

struct CycleSearchResult {
    std::vector<Cycle> cycles;
    bool complete = true;       ///< false when some seed exhausted its budget unresolved
    std::vector<std::string> notes;
};

namespace detail {

/// Newton refinement of a candidate period-k point: solve p^k(z) = z using
/// d/dz p^k = product of p' along the orbit.
inline bool refine_periodic(const Polynomial& p, int k, cpx& z, int iters = 60) {
    for (int it = 0; it < iters; ++it) {
        cpx w = z, deriv = 1.0;
        for (int j = 0; j < k; ++j) {
            cpx val, dp;
            p.eval2(w, val, dp);
            deriv *= dp;
            w = val;
        }
        cpx f = w - z;
        cpx df = deriv - 1.0;
        if (std::abs(df) < 1e-300) return false;
        cpx step = f / df;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return true;
    }
    return false;
}

inline Cycle assemble_cycle(const Polynomial& p, cpx z, int k) {
    Cycle c;
    c.points.reserve(static_cast<std::size_t>(k));
    cpx w = z;
    c.multiplier = 1.0;
    for (int j = 0; j < k; ++j) {
        c.points.push_back(w);
        cpx val, dp;
        p.eval2(w, val, dp);
        c.multiplier *= dp;
        w = val;
    }
    return c;
}

} // namespace detail

/// Attracting cycles of period <= max_period reachable from the critical
/// points (every attracting cycle attracts one) plus seed_count extra random
/// starts. Deduplicated with set distance 1e-6; far above the refinement
/// error, far below inter-cycle gaps at desk scale.
inline CycleSearchResult find_attracting_cycles(const Polynomial& p, int max_period,
                                                int seed_count = 8, int budget = 4000,
                                                std::uint64_t seed = 1) {
    p.require_dynamical("find_attracting_cycles");
    if (max_period < 1) throw std::invalid_argument("find_attracting_cycles: max_period >= 1");

    CycleSearchResult result;
    const double R = p.escape_radius();

    std::vector<cpx> seeds = critical_points(p);
    Rng rng(seed);
    for (int i = 0; i < seed_count; ++i) seeds.push_back(rng.in_disk(R));

    for (const cpx& s0 : seeds) {
        cpx z = s0;
        bool escaped = false;
        for (int it = 0; it < budget; ++it) {
            z = p.eval(z);
            if (std::abs(z) > R) {
                escaped = true;
                break;
            }
        }
        if (escaped) continue;

        // look for an approximate return, shortest period first
        bool found = false;
        for (int k = 1; k <= max_period && !found; ++k) {
            cpx w = p.iterate(z, k);
            if (std::abs(w - z) > 1e-3 * (1.0 + std::abs(z))) continue;
            cpx cand = z;
            if (!detail::refine_periodic(p, k, cand)) continue;
            // insist on the minimal period
            bool minimal = true;
            for (int div = 1; div < k; ++div)
                if (k % div == 0 && std::abs(p.iterate(cand, div) - cand) < 1e-9) minimal = false;
            if (!minimal) continue;
            Cycle c = detail::assemble_cycle(p, cand, k);
            if (!c.attracting()) continue;
            if (c.residual(p) > 1e-9) continue;
            bool dup = false;
            for (const Cycle& known : result.cycles)
                if (cycle_distance(known, c) <= 1e-6) dup = true;
            if (!dup) result.cycles.push_back(std::move(c));
            found = true;
        }
        if (!found) {
            result.complete = false;
            result.notes.push_back("seed did not resolve within budget");
        }
    }
    return result;
}

/// Per-critical-point verdict of the desk hyperbolicity proxy.
struct CriticalOrbitVerdict {
    cpx critical_point;
    enum class Kind { Converged, Escaped, Unresolved } kind = Kind::Unresolved;
    int steps = 0;
    int cycle_index = -1;
};

struct HyperbolicityReport {
    bool hyperbolic = false;
    std::vector<CriticalOrbitVerdict> verdicts;
    std::vector<Cycle> cycles;
};

/// Desk proxy for "p is hyperbolic": every critical orbit enters a 1e-6
/// neighborhood of a found attracting cycle within the budget. Escape to
/// infinity fails the proxy and is tagged as such.
inline HyperbolicityReport is_desk_hyperbolic(const Polynomial& p, int budget = 4000) {
    p.require_dynamical("is_desk_hyperbolic");
    HyperbolicityReport report;
    auto cycles = find_attracting_cycles(p, 16, 8, budget);
    report.cycles = cycles.cycles;

    const double R = p.escape_radius();
    bool all_ok = true;
    for (const cpx& c0 : critical_points(p)) {
        CriticalOrbitVerdict v;
        v.critical_point = c0;
        cpx z = c0;
        for (int it = 0; it <= budget; ++it) {
            for (std::size_t ci = 0; ci < report.cycles.size(); ++ci) {
                for (const cpx& q : report.cycles[ci].points) {
                    if (std::abs(z - q) <= 1e-6) {
                        v.kind = CriticalOrbitVerdict::Kind::Converged;
                        v.steps = it;
                        v.cycle_index = static_cast<int>(ci);
                        break;
                    }
                }
                if (v.kind == CriticalOrbitVerdict::Kind::Converged) break;
            }
            if (v.kind == CriticalOrbitVerdict::Kind::Converged) break;
            if (std::abs(z) > R) {
                v.kind = CriticalOrbitVerdict::Kind::Escaped;
                v.steps = it;
                break;
            }
            z = p.eval(z);
        }
        if (v.kind != CriticalOrbitVerdict::Kind::Converged) all_ok = false;
        report.verdicts.push_back(v);
    }
    report.hyperbolic = all_ok;
    return report;
}

} // namespace limitlab
