#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "limitlab/polynomial.hpp"
#include "limitlab/rng.hpp"

namespace limitlab {

/// Thrown when every rung of the solver ladder fails; carries the offending
/// right-hand side so callers can report which fiber broke.
struct RootFindingError : std::runtime_error {
    RootFindingError(const std::string& msg, cpx target_) : std::runtime_error(msg), target(target_) {}
    cpx target;
};

namespace detail {

inline double poly_scale_at(const std::vector<cpx>& c, double absw) {
    // sum |a_k| |w|^k, the natural backward-error scale
    double s = 0.0, pw = 1.0;
    for (const cpx& a : c) {
        s += std::abs(a) * pw;
        pw *= absw;
    }
    return s;
}

inline void newton_polish(const std::vector<cpx>& c, cpx& w, int iters = 8) {
    for (int it = 0; it < iters; ++it) {
        cpx p = c.back(), dp = 0.0;
        for (std::size_t i = c.size() - 1; i-- > 0;) {
            dp = dp * w + p;
            p = p * w + c[i];
        }
        if (p == cpx(0.0, 0.0) || dp == cpx(0.0, 0.0)) return;
        cpx step = p / dp;
        w -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(w))) return;
    }
}

/// Stable quadratic: sign of the discriminant root chosen to avoid
/// cancellation, second root by Vieta.
inline std::vector<cpx> solve_quadratic(cpx a, cpx b, cpx c) {
    cpx disc = std::sqrt(b * b - 4.0 * a * c);
    cpx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cpx(0.0, 0.0)) return {cpx(0.0, 0.0), cpx(0.0, 0.0)};
    return {q / a, c / q};
}

/// One Aberth-Ehrlich sweep from the given initial configuration. Runs until
/// corrections settle or the iteration cap; residual acceptance is the
/// caller's job.
inline void aberth_sweep(const std::vector<cpx>& c, std::vector<cpx>& w, int max_iter = 400) {
    const int n = static_cast<int>(w.size());
    for (int it = 0; it < max_iter; ++it) {
        bool done = true;
        for (int i = 0; i < n; ++i) {
            cpx p = c.back(), dp = 0.0;
            for (std::size_t k = c.size() - 1; k-- > 0;) {
                dp = dp * w[i] + p;
                p = p * w[i] + c[k];
            }
            if (p == cpx(0.0, 0.0)) continue;
            cpx nwt = (dp == cpx(0.0, 0.0)) ? cpx(1e-8, 1e-8) : p / dp;
            cpx sum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                cpx d = w[i] - w[j];
                if (d == cpx(0.0, 0.0)) d = cpx(1e-14, 1e-14);
                sum += 1.0 / d;
            }
            cpx den = 1.0 - nwt * sum;
            cpx corr = (den == cpx(0.0, 0.0)) ? nwt : nwt / den;
            w[i] -= corr;
            if (!(std::abs(corr) <= 1e-14 * (1.0 + std::abs(w[i])))) done = false;
            if (!std::isfinite(w[i].real()) || !std::isfinite(w[i].imag())) {
                w[i] = cpx(0.0, 0.0);
                done = false;
            }
        }
        if (done) return;
    }
}

/// Eigenvalues of a complex upper-Hessenberg matrix by explicit shifted QR
/// with Givens rotations (real cosine, complex sine). Desk sizes only
/// (n <= 16), so dense O(n^3) sweeps are irrelevant.
inline std::vector<cpx> hessenberg_eigenvalues(std::vector<cpx> h, int n) {
    auto at = [&](int i, int j) -> cpx& { return h[static_cast<std::size_t>(i) * n + j]; };
    std::vector<cpx> eig(static_cast<std::size_t>(n));
    const double eps = 1e-15;
    int m = n;
    int stuck = 0;
    while (m > 0) {
        if (m == 1) {
            eig[0] = at(0, 0);
            break;
        }
        int l = m - 1;
        while (l > 0 && std::abs(at(l, l - 1)) >
                            eps * (std::abs(at(l - 1, l - 1)) + std::abs(at(l, l))) + 1e-300)
            --l;
        if (l == m - 1) {
            eig[m - 1] = at(m - 1, m - 1);
            --m;
            stuck = 0;
            continue;
        }
        cpx a = at(m - 2, m - 2), b = at(m - 2, m - 1), cc = at(m - 1, m - 2), d = at(m - 1, m - 1);
        cpx tr = a + d, det = a * d - b * cc;
        cpx disc = std::sqrt(tr * tr * 0.25 - det);
        cpx s1 = tr * 0.5 + disc, s2 = tr * 0.5 - disc;
        cpx shift = (std::abs(s1 - d) < std::abs(s2 - d)) ? s1 : s2;
        if (++stuck % 24 == 0) shift += cpx(std::abs(cc) + std::abs(b), 0.0);
        if (stuck > 600) throw std::runtime_error("hessenberg QR stalled");

        std::vector<double> gc(static_cast<std::size_t>(m), 1.0);
        std::vector<cpx> gs(static_cast<std::size_t>(m), cpx(0.0, 0.0));
        for (int i = l; i < m; ++i) at(i, i) -= shift;
        // left rotations: R = G_{m-2} ... G_l (H - shift I)
        for (int k = l; k < m - 1; ++k) {
            cpx x = at(k, k), z = at(k + 1, k);
            double r = std::hypot(std::abs(x), std::abs(z));
            double cn = 1.0;
            cpx sn(0.0, 0.0);
            if (r > 0.0) {
                if (std::abs(x) > 0.0) {
                    cn = std::abs(x) / r;
                    sn = (x / std::abs(x)) * std::conj(z) / r;
                } else {
                    cn = 0.0;
                    sn = std::conj(z) / std::abs(z);
                }
            }
            gc[static_cast<std::size_t>(k)] = cn;
            gs[static_cast<std::size_t>(k)] = sn;
            for (int j = k; j < m; ++j) {
                cpx t1 = at(k, j), t2 = at(k + 1, j);
                at(k, j) = cn * t1 + sn * t2;
                at(k + 1, j) = -std::conj(sn) * t1 + cn * t2;
            }
        }
        // right rotations: H = R G_l^H ... G_{m-2}^H + shift I
        for (int k = l; k < m - 1; ++k) {
            double cn = gc[static_cast<std::size_t>(k)];
            cpx sn = gs[static_cast<std::size_t>(k)];
            int last = std::min(k + 2, m - 1);
            for (int i = l; i <= last; ++i) {
                cpx t1 = at(i, k), t2 = at(i, k + 1);
                at(i, k) = cn * t1 + std::conj(sn) * t2;
                at(i, k + 1) = -sn * t1 + cn * t2;
            }
        }
        for (int i = l; i < m; ++i) at(i, i) += shift;
    }
    return eig;
}

/// Companion-matrix route: eigenvalues of the Frobenius companion of the
/// monic normalization.
inline std::vector<cpx> companion_roots(const std::vector<cpx>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    cpx lead = c.back();
    std::vector<cpx> h(static_cast<std::size_t>(n) * n, cpx(0.0, 0.0));
    for (int i = 1; i < n; ++i) h[static_cast<std::size_t>(i) * n + (i - 1)] = 1.0;
    for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i) * n + (n - 1)] = -c[static_cast<std::size_t>(i)] / lead;
    return hessenberg_eigenvalues(std::move(h), n);
}

} // namespace detail

/// All complex roots of the polynomial, with multiplicity (count == degree).
/// Ladder: closed forms for degree <= 2, then Aberth-Ehrlich with three
/// perturbed restarts, then the companion matrix. Deterministic for a fixed
/// polynomial. Roots come back sorted by (Re, Im) so branch indices mean the
/// same thing across runs.
inline std::vector<cpx> roots_of(const Polynomial& q) {
    const auto& c = q.coefficients();
    const int n = q.degree();
    if (n < 1) return {};

    std::vector<cpx> out;
    if (n == 1) {
        out = {-c[0] / c[1]};
    } else if (n == 2) {
        out = detail::solve_quadratic(c[2], c[1], c[0]);
    } else {
        double radius = 0.0;
        for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[static_cast<std::size_t>(i)] / c.back()));
        radius = 1.0 + radius;

        auto residual_ok = [&](const std::vector<cpx>& w) {
            for (const cpx& wi : w) {
                cpx p = q.eval(wi);
                double scale = detail::poly_scale_at(c, std::abs(wi));
                if (!(std::abs(p) <= 1e-10 * std::max(1.0, scale))) return false;
            }
            return true;
        };

        Rng rng(0x1b217a11u ^ static_cast<std::uint64_t>(n));
        bool solved = false;
        for (int attempt = 0; attempt < 4 && !solved; ++attempt) {
            std::vector<cpx> w(static_cast<std::size_t>(n));
            double phase = 0.1875 + (attempt ? rng.next_double() : 0.0);
            double rj = radius * (attempt ? (0.7 + 0.6 * rng.next_double()) : 1.0);
            for (int k = 0; k < n; ++k)
                w[static_cast<std::size_t>(k)] =
                    std::polar(rj, 2.0 * M_PI * (static_cast<double>(k) / n + phase));
            detail::aberth_sweep(c, w);
            for (cpx& wi : w) detail::newton_polish(c, wi);
            if (residual_ok(w)) {
                out = std::move(w);
                solved = true;
            }
        }
        if (!solved) {
            std::vector<cpx> w = detail::companion_roots(c);
            for (cpx& wi : w) detail::newton_polish(c, wi);
            if (!residual_ok(w))
                throw RootFindingError("root ladder exhausted for polynomial " + q.str(), cpx(0.0, 0.0));
            out = std::move(w);
        }
    }

    for (cpx& wi : out) detail::newton_polish(c, wi, 4);
    std::sort(out.begin(), out.end(), [](const cpx& a, const cpx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

/// All solutions of p(w) = c, with multiplicity; |p(w)-c| <= 1e-10 max(1,|c|)
/// per root or a RootFindingError naming c.
inline std::vector<cpx> preimages(const Polynomial& p, cpx c) {
    std::vector<cpx> shifted = p.coefficients();
    shifted[0] -= c;
    std::vector<cpx> w;
    try {
        w = roots_of(Polynomial(std::move(shifted)));
    } catch (const RootFindingError& e) {
        throw RootFindingError(std::string("preimages: ") + e.what(), c);
    }
    for (const cpx& wi : w) {
        if (!(std::abs(p.eval(wi) - c) <= 1e-10 * std::max(1.0, std::abs(c))))
            throw RootFindingError("preimage residual too large", c);
    }
    return w;
}

/// Roots of p', with multiplicity (count == degree - 1). Degree >= 2 required.
inline std::vector<cpx> critical_points(const Polynomial& p) {
    p.require_dynamical("critical_points");
    return roots_of(p.derivative());
}

} // namespace limitlab
