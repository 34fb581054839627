#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "limitlab/koenigs.hpp"
#include "limitlab/solenoid.hpp"

namespace limitlab {

struct TowerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DepthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The annulus pair of the base conjugacy step: Gamma (inner, a Koenigs level
/// curve around z*) and Gamma' = p^{-1}(Gamma) in the component (outer),
/// against the round model annulus r <= |w| <= r^{1/n}.
struct AnnulusModel {
    ClosedCurve inner;   ///< Gamma
    ClosedCurve outer;   ///< Gamma'
    double model_r = 0.25;
    int degree = 2;      ///< n, the degree of p on the component
    cpx z_star{0.0, 0.0};
};

/// Conjugacy psi between the distinguished component of the truncated natural
/// extension over the basin and the cone-over-solenoid model: a tower of
/// pulled-back curves Gamma_i with boundary correspondences onto circles of
/// radius r^(1/n^i), the base annulus homeomorphism by fibered interpolation,
/// and covering-space root lifts above it.
class ConjugacyMap {
public:
    ConjugacyMap(Polynomial p, cpx z_star, int levels = 6, double model_r = 0.25, int M = 4096)
        : p_(std::move(p)), r_(model_r), M_(M) {
        p_.require_dynamical("ConjugacyMap");
        frame_ = fixed_point_frame(p_, z_star);
        n_ = basin_degree(p_, z_star);
        if (n_ < 2) throw std::invalid_argument("ConjugacyMap: component degree must be >= 2");
        if (!(model_r > 0.0 && model_r < 1.0))
            throw std::invalid_argument("ConjugacyMap: model radius must be in (0,1)");

        EquipotentialResult eq = equipotential(p_, z_star, default_level(), M_);
        level0_ = eq.level;
        curves_.push_back(std::move(eq.curve));
        views_.emplace_back(curves_.back(), frame_.z_star);
        level_residuals_.push_back(0.0);
        ensure_levels(std::max(1, levels));
    }

    const Polynomial& poly() const { return p_; }
    const FixedPointFrame& frame() const { return frame_; }
    int degree() const { return n_; }
    double model_radius() const { return r_; }
    int levels() const { return static_cast<int>(curves_.size()) - 1; }
    int resolution() const { return M_; }
    const ClosedCurve& curve(int i) const { return curves_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& level_residuals() const { return level_residuals_; }

    AnnulusModel annulus() const { return {curves_[0], curves_[1], r_, n_, frame_.z_star}; }

    /// model radius of the level-i boundary circle, r^(1/n^i)
    double model_level_radius(int i) const {
        return std::pow(r_, 1.0 / std::pow(static_cast<double>(n_), i));
    }

    /// Extend the curve tower: Gamma_{i+1} = p^{-1}(Gamma_i) in the component,
    /// parametrized so p(Gamma_{i+1}(theta)) = Gamma_i(n theta); branch
    /// marching keeps the parametrization continuous, and each new level is
    /// validated by winding and by its anchor-coherence residual.
    void ensure_levels(int levels) {
        while (static_cast<int>(curves_.size()) - 1 < levels) {
            if (static_cast<int>(curves_.size()) > kMaxLevels)
                throw TowerError("ConjugacyMap: tower level cap exceeded");
            const ClosedCurve& prev = curves_.back();
            ClosedCurve next;
            next.samples.resize(static_cast<std::size_t>(M_));
            for (int j = 0; j < M_; ++j) {
                cpx target = prev.at_index(j * n_);
                cpx anchor;
                if (j == 0) {
                    // outward continuation of the angle-0 ray
                    cpx dir = prev.at_index(0) - frame_.z_star;
                    anchor = frame_.z_star + dir * (1.0 + std::abs(dir));
                } else if (j == 1) {
                    anchor = next.samples[0];
                } else {
                    anchor = 2.0 * next.samples[static_cast<std::size_t>(j - 1)] -
                             next.samples[static_cast<std::size_t>(j - 2)];
                }
                double best = 1e300;
                cpx pick{};
                for (const cpx& w : preimages(p_, target)) {
                    double d = std::abs(w - anchor);
                    if (d < best) {
                        best = d;
                        pick = w;
                    }
                }
                next.samples[static_cast<std::size_t>(j)] = pick;
            }
            if (next.winding_about(frame_.z_star) != 1)
                throw TowerError("ConjugacyMap: pulled-back curve does not wind once");
            for (const cpx& w : next.samples)
                if (classify_point(p_, w, 2000).escaped)
                    throw TowerError("ConjugacyMap: pullback left the bounded component");
            curves_.push_back(std::move(next));
            views_.emplace_back(curves_.back(), frame_.z_star);
            level_residuals_.push_back(0.0);
            int i = static_cast<int>(curves_.size()) - 2;   // the annulus A_i just completed
            level_residuals_[static_cast<std::size_t>(i) + 1] = anchor_residual(i + 1);
        }
    }

    /// Tower coordinate of w: the real level index u with |phi| = s at u = 0
    /// and one annulus per unit. Using the Koenigs magnitude keeps leveling
    /// exactly compatible with p (|phi(p w)| = |lambda||phi(w)| is an
    /// identity), which the discretized curve radii cannot promise near a
    /// curve.
    double tower_coordinate(cpx w) const {
        double mag = std::abs(koenigs_phi(p_, frame_, w));
        if (frame_.superattracting) {
            // levels sit at |phi| = s^(1/n^i)
            if (mag >= 1.0 || mag <= 0.0) return 1e9;
            return std::log(std::log(level0_) / std::log(mag)) / std::log(static_cast<double>(n_));
        }
        return std::log(mag / level0_) / std::log(1.0 / std::abs(frame_.lambda));
    }

    /// Is w inside the tower region (outside or on Gamma)?
    bool in_tower(cpx w) const { return tower_coordinate(w) >= -1e-9; }

    /// psi-bar on the tower: base annulus by (theta, t) interpolation, higher
    /// annuli by n-th-root lifting with the interpolated value as the branch
    /// estimate, so p0 . psi = psi . p holds to rounding by construction.
    cpx psi(cpx w) { return psi_at_level(w, locate_level(w)); }

    /// psi-hat: unshift until the head enters the tower, apply psi-bar
    /// entrywise, encode as a cone point, push forward in the model. The
    /// fixed history goes to the cone point exactly.
    ConePoint<double> psi_hat(const History& h) {
        double near_star = 0.0;
        for (const cpx& z : h.entries()) near_star = std::max(near_star, std::abs(z - frame_.z_star));
        if (near_star <= 1e-12 * (1.0 + std::abs(frame_.z_star))) {
            ConePoint<double> c;
            c.r = 0.0;
            c.s.base = n_;
            c.s.theta0 = 0.0;
            c.s.digits.assign(static_cast<std::size_t>(h.depth()), 0);
            return c;
        }
        int m = -1;
        for (int i = 0; i <= h.depth(); ++i) {
            if (in_tower(h.entry(i))) {
                m = i;
                break;
            }
        }
        if (m < 0)
            throw DepthError("psi_hat: history never enters the tower region within its depth");
        std::vector<cpx> model;
        model.reserve(static_cast<std::size_t>(h.depth() - m) + 1);
        for (int i = m; i <= h.depth(); ++i) model.push_back(psi(h.entry(i)));
        ConePoint<double> c = encode_history_p0(History::unchecked(std::move(model)), n_, 1e-4);
        for (int push = 0; push < m; ++push) c = cone_shift(c);
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["version"] = 1;
        j["poly"] = p_.str();
        j["z_star"] = {frame_.z_star.real(), frame_.z_star.imag()};
        j["lambda"] = {frame_.lambda.real(), frame_.lambda.imag()};
        j["degree"] = n_;
        j["model_r"] = r_;
        j["level0"] = level0_;
        nlohmann::json lv = nlohmann::json::array();
        for (std::size_t i = 0; i < curves_.size(); ++i) {
            nlohmann::json jc;
            jc["model_radius"] = model_level_radius(static_cast<int>(i));
            jc["residual"] = level_residuals_[i];
            nlohmann::json arr = nlohmann::json::array();
            for (const cpx& z : curves_[i].samples) arr.push_back({z.real(), z.imag()});
            jc["curve"] = std::move(arr);
            lv.push_back(std::move(jc));
        }
        j["levels"] = std::move(lv);
        return j;
    }

private:
    static constexpr int kMaxLevels = 64;

    double default_level() const {
        // superattracting monomial case: any level works, match the model so
        // psi restricts to the identity on the anchors
        return frame_.superattracting ? r_ : 0.25;
    }

    /// annulus index of w, auto-extending the tower as needed; the small bias
    /// parks on-curve points in the annulus below so they never force an
    /// extra level
    int locate_level(cpx w) {
        double u = tower_coordinate(w);
        if (u < -1e-9) throw TowerError("psi: point inside the base curve; unshift further first");
        return static_cast<int>(std::floor(std::max(0.0, u - 1e-9)));
    }

    /// psi with the annulus index pinned by the caller
    cpx psi_at_level(cpx w, int level) {
        ensure_levels(level + 1);
        std::vector<cpx> chain{w};
        for (int j = 0; j < level; ++j) chain.push_back(p_.eval(chain.back()));
        cpx b = interp_value(chain.back(), 0);
        for (int j = level - 1; j >= 0; --j) {
            cpx estimate = interp_value(chain[static_cast<std::size_t>(j)], level - j);
            b = nearest_nth_root(b, estimate);
        }
        return b;
    }

    /// fibered (theta, t) interpolation between the level-i boundary
    /// correspondences; the base-annulus homeomorphism on A_0, the branch
    /// estimate above
    cpx interp_value(cpx w, int i) const {
        cpx rel = w - frame_.z_star;
        double mag = std::abs(rel);
        double dir = std::arg(rel) / (2.0 * M_PI);
        const StarView& in = views_[static_cast<std::size_t>(i)];
        const StarView& out = views_[static_cast<std::size_t>(i) + 1];
        double r_in = in.radius_at(dir), r_out = out.radius_at(dir);
        double t = (r_out > r_in) ? (mag - r_in) / (r_out - r_in) : 0.0;
        t = std::min(1.0, std::max(0.0, t));
        double th_in = in.param_at(dir), th_out = out.param_at(dir);
        double delta = th_out - th_in;
        delta -= std::round(delta);
        double nu = th_in + t * delta;
        double npow = std::pow(static_cast<double>(n_), i);
        double exponent = (1.0 - t + t / n_) / npow;
        return std::polar(std::pow(r_, exponent), 2.0 * M_PI * nu);
    }

    cpx nearest_nth_root(cpx b, cpx estimate) const {
        double rho = std::pow(std::abs(b), 1.0 / n_);
        double base_arg = std::arg(b) / n_;
        cpx best{};
        double best_d = 1e300;
        for (int m = 0; m < n_; ++m) {
            cpx cand = std::polar(rho, base_arg + 2.0 * M_PI * m / n_);
            double d = std::abs(cand - estimate);
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
        return best;
    }

    /// coherence of the level-i boundary anchor with the lift construction;
    /// the level is pinned so boundary probes cannot request further levels
    double anchor_residual(int i) {
        double worst = 0.0;
        int stride = std::max(1, M_ / 256);
        for (int j = 0; j < M_; j += stride) {
            cpx w = curves_[static_cast<std::size_t>(i)].at_index(j);
            cpx anchor = std::polar(model_level_radius(i),
                                    2.0 * M_PI * static_cast<double>(j) / M_);
            worst = std::max(worst, std::abs(psi_at_level(w, std::max(0, i - 1)) - anchor));
        }
        return worst;
    }

    Polynomial p_;
    FixedPointFrame frame_;
    int n_ = 2;
    double r_ = 0.25;
    int M_ = 4096;
    double level0_ = 0.0;
    std::vector<ClosedCurve> curves_;
    std::vector<StarView> views_;
    std::vector<double> level_residuals_;
};

/// Base annulus pair as a standalone artifact (Gamma from a Koenigs level,
/// Gamma' by parametrized pullback).
inline AnnulusModel build_annulus(const Polynomial& p, cpx z_star, double model_r = 0.25,
                                  int M = 4096) {
    ConjugacyMap c(p, z_star, 1, model_r, M);
    return c.annulus();
}

/// The base-annulus fibered homeomorphism A_0 -> B_0 on its own; outside the
/// annulus is an error.
inline cpx psi0(const AnnulusModel& a, cpx w) {
    StarView in(a.inner, a.z_star), out(a.outer, a.z_star);
    cpx rel = w - a.z_star;
    double mag = std::abs(rel);
    double dir = std::arg(rel) / (2.0 * M_PI);
    double r_in = in.radius_at(dir), r_out = out.radius_at(dir);
    double t = (mag - r_in) / (r_out - r_in);
    if (t < -1e-6 || t > 1.0 + 1e-6)
        throw std::invalid_argument("psi0: point outside the annulus A0");
    t = std::min(1.0, std::max(0.0, t));
    double th_in = in.param_at(dir), th_out = out.param_at(dir);
    double delta = th_out - th_in;
    delta -= std::round(delta);
    double nu = th_in + t * delta;
    double exponent = 1.0 - t + t / a.degree;
    return std::polar(std::pow(a.model_r, exponent), 2.0 * M_PI * nu);
}

struct ConjugacyReport {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    int argmax = -1;
    History argmax_history;
    double min_pairwise = 1e300;   ///< injectivity proxy over the sample set
    int samples = 0;
};

/// Random histories in the basin: a Koenigs-sampled point inside Gamma grows
/// a backward orbit by uniform branch choices, then a few leading entries are
/// dropped so heads land at every tower level (inside Gamma, base annulus,
/// deeper annuli alike).
inline History sample_history(ConjugacyMap& c, int depth, Rng& rng) {
    const Polynomial& p = c.poly();
    double s = std::abs(c.curve(0).at_index(0) - c.frame().z_star);
    cpx seed;
    for (;;) {
        double mag = rng.uniform(0.35, 0.95);
        cpx u = std::polar(mag * s, 2.0 * M_PI * rng.next_double());
        seed = koenigs_inverse(p, c.frame(), u);
        if (std::abs(seed - c.frame().z_star) > 1e-6) break;
    }
    int drop = static_cast<int>(rng.below(4));
    std::vector<cpx> entries{seed};
    for (int i = 0; i < depth + drop; ++i) {
        auto roots = preimages(p, entries.back());
        entries.push_back(roots[static_cast<std::size_t>(rng.below(roots.size()))]);
    }
    entries.erase(entries.begin(), entries.begin() + drop);
    return History::unchecked(std::move(entries));
}

/// Shift-equivariance of psi_hat over random samples:
/// distance(psi_hat(shift h), cone-shift(psi_hat h)), plus the pairwise
/// injectivity proxy.
inline ConjugacyReport verify_conjugacy(ConjugacyMap& c, int samples, int depth,
                                        std::uint64_t seed = 7) {
    Rng rng(seed);
    ConjugacyReport rep;
    rep.samples = samples;
    std::vector<ConePoint<double>> images;
    images.reserve(static_cast<std::size_t>(samples));
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        History h = sample_history(c, depth, rng);
        ConePoint<double> via_model = cone_shift(c.psi_hat(h));
        ConePoint<double> via_map = c.psi_hat(h.shift(c.poly()));
        double resid = cone_distance(via_map, via_model);
        total += resid;
        if (resid > rep.max_residual) {
            rep.max_residual = resid;
            rep.argmax = i;
            rep.argmax_history = h;
        }
        images.push_back(c.psi_hat(h));
    }
    rep.mean_residual = samples > 0 ? total / samples : 0.0;
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j)
            rep.min_pairwise = std::min(rep.min_pairwise, cone_distance(images[i], images[j]));
    return rep;
}

/// extend_tower as a free operation over the map object
inline void extend_tower(ConjugacyMap& c, int levels) { c.ensure_levels(levels); }

} // namespace limitlab
