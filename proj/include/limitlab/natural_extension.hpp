#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitlab/fatou.hpp"
#include "limitlab/roots.hpp"

namespace limitlab {

struct HistoryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncated backward orbit (z_0, z_-1, ..., z_-N): entry i+1 is a preimage of
/// entry i. A point of the depth-N truncation of the natural extension.
class History {
public:
    History() = default;

    /// checked constructor: enforces the step invariant
    History(const Polynomial& p, std::vector<cpx> entries, bool ramified = false)
        : entries_(std::move(entries)), ramified_(ramified) {
        if (entries_.empty()) throw HistoryError("History: needs at least one entry");
        double r = step_residual(p);
        if (r > 1e-9) throw HistoryError("History: step invariant violated, residual " + format_double(r));
    }

    static History unchecked(std::vector<cpx> entries, bool ramified = false) {
        History h;
        h.entries_ = std::move(entries);
        h.ramified_ = ramified;
        return h;
    }

    int depth() const { return static_cast<int>(entries_.size()) - 1; }
    const std::vector<cpx>& entries() const { return entries_; }
    cpx head() const { return entries_.front(); }
    cpx entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }   ///< z_{-i}
    bool ramified() const { return ramified_; }

    /// worst relative defect of |p(z_{-i-1}) - z_{-i}|
    double step_residual(const Polynomial& p) const {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < entries_.size(); ++i) {
            double num = std::abs(p.eval(entries_[i + 1]) - entries_[i]);
            worst = std::max(worst, num / std::max(1.0, std::abs(entries_[i])));
        }
        return worst;
    }

    /// truncated forward shift: (p(z_0), z_0, ..., z_-N), depth grows by one
    History shift(const Polynomial& p) const {
        std::vector<cpx> e;
        e.reserve(entries_.size() + 1);
        e.push_back(p.eval(entries_.front()));
        e.insert(e.end(), entries_.begin(), entries_.end());
        return unchecked(std::move(e), ramified_);
    }

    /// drop the head; optionally extend the tail by the branch-th preimage of
    /// the deepest entry (branch indexes the sorted preimage list)
    History unshift(const Polynomial& p, std::optional<int> branch = std::nullopt) const {
        if (depth() < 1) throw HistoryError("unshift: depth must be >= 1");
        std::vector<cpx> e(entries_.begin() + 1, entries_.end());
        if (branch) {
            auto roots = preimages(p, e.back());
            if (*branch < 0 || *branch >= static_cast<int>(roots.size()))
                throw HistoryError("unshift: branch index out of range");
            e.push_back(roots[static_cast<std::size_t>(*branch)]);
        }
        return unchecked(std::move(e), ramified_);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["depth"] = depth();
        nlohmann::json arr = nlohmann::json::array();
        for (const cpx& z : entries_) arr.push_back({z.real(), z.imag()});
        j["entries"] = std::move(arr);
        if (ramified_) j["ramified"] = true;
        return j;
    }

private:
    std::vector<cpx> entries_;
    bool ramified_ = false;
};

/// All depth-N histories over z: the full preimage tree, d^N leaves counted
/// with multiplicity. Branches passing within branch_tol of a repeated root
/// are flagged ramified rather than rejected.
inline std::vector<History> fiber(const Polynomial& p, cpx z, int N, double branch_tol = 1e-6) {
    p.require_dynamical("fiber");
    if (N < 0) throw std::invalid_argument("fiber: depth must be >= 0");
    std::vector<std::pair<std::vector<cpx>, bool>> frontier{{{z}, false}};
    for (int level = 0; level < N; ++level) {
        std::vector<std::pair<std::vector<cpx>, bool>> next;
        next.reserve(frontier.size() * static_cast<std::size_t>(p.degree()));
        for (auto& [stem, ram] : frontier) {
            auto roots = preimages(p, stem.back());
            for (std::size_t a = 0; a < roots.size(); ++a) {
                bool collides = false;
                for (std::size_t b = 0; b < roots.size(); ++b)
                    if (a != b && std::abs(roots[a] - roots[b]) <= branch_tol) collides = true;
                auto extended = stem;
                extended.push_back(roots[a]);
                next.emplace_back(std::move(extended), ram || collides);
            }
        }
        frontier = std::move(next);
    }
    std::vector<History> out;
    out.reserve(frontier.size());
    for (auto& [entries, ram] : frontier) out.push_back(History::unchecked(std::move(entries), ram));
    return out;
}

struct ContinuationError : std::runtime_error {
    ContinuationError(const std::string& msg, int depth_, cpx where_)
        : std::runtime_error(msg), depth(depth_), where(where_) {}
    int depth;
    cpx where;
};

namespace detail {

/// continue every entry of the history across one small step of the base
/// point. Tracking uses the branch-derivative prediction
/// dz_{-i} = dz_{-i+1} / p'(z_{-i}), which also settles equidistant ties the
/// way the previous derivative direction points. Returns false when the
/// nearest root is still ambiguous and the step must be halved.
inline bool continue_step(const Polynomial& p, const Polynomial& dp, const std::vector<cpx>& cur,
                          cpx new_head, std::vector<cpx>& out) {
    out.resize(cur.size());
    out[0] = new_head;
    cpx moved = new_head - cur[0];
    for (std::size_t i = 1; i < cur.size(); ++i) {
        cpx deriv = dp.eval(cur[i]);
        cpx predicted = cur[i] + (std::abs(deriv) > 1e-12 ? moved / deriv : cpx(0.0, 0.0));
        double best = 1e300, second = 1e300;
        cpx pick{};
        for (const cpx& w : preimages(p, out[i - 1])) {
            double d = std::abs(w - predicted);
            if (d < best) {
                second = best;
                best = d;
                pick = w;
            } else if (d < second) {
                second = d;
            }
        }
        if (best > 0.45 * second) return false;   // jump comparable to the branch gap
        moved = pick - cur[i];
        out[i] = pick;
    }
    return true;
}

} // namespace detail

/// Analytic continuation of a history along a polyline in the base. The path
/// must avoid forward orbits of critical points; this is checked at the
/// polyline vertices out to the history depth. Adaptive step halving; a step
/// collapsing below 1e-12 raises ContinuationError with depth and location.
inline History continue_along_path(const Polynomial& p, const History& h,
                                   const std::vector<cpx>& path, double margin = 1e-6) {
    p.require_dynamical("continue_along_path");
    if (path.empty()) return h;
    if (std::abs(path.front() - h.head()) > 1e-9)
        throw std::invalid_argument("continue_along_path: path must start at the history head");

    // forward critical orbit out to the relevant depth
    std::vector<cpx> obstacles;
    for (const cpx& c0 : critical_points(p)) {
        cpx v = p.eval(c0);
        for (int j = 0; j < h.depth(); ++j) {
            obstacles.push_back(v);
            v = p.eval(v);
            if (std::abs(v) > 4.0 * p.escape_radius()) break;
        }
    }
    for (const cpx& obstacle : obstacles)
        for (const cpx& q : path)
            if (std::abs(q - obstacle) < margin)
                throw std::invalid_argument(
                    "continue_along_path: path passes within margin of a critical orbit");

    const Polynomial dp = p.derivative();
    std::vector<cpx> cur(h.entries());
    for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
        cpx a = path[seg], b = path[seg + 1];
        double t = 0.0;
        double step = 1.0;
        while (t < 1.0) {
            double tn = std::min(1.0, t + step);
            cpx target = a + (b - a) * tn;
            std::vector<cpx> next;
            if (detail::continue_step(p, dp, cur, target, next)) {
                cur = std::move(next);
                t = tn;
                step = std::min(1.0, step * 1.9);
            } else {
                step *= 0.5;
                if (step * std::abs(b - a) < 1e-12)
                    throw ContinuationError("continue_along_path: step collapsed near a critical value",
                                            static_cast<int>(cur.size()) - 1, target);
            }
        }
    }
    return History::unchecked(std::move(cur), h.ramified());
}

/// Component label (..., [w_-1], [w_0]) of a history against a chain of
/// atlases for p^{-m}(Omega); entries deeper than the resolvable chain cut the
/// label short.
struct ComponentLabel {
    std::vector<int> ids;       ///< ids[i] labels entry z_{-i}
    bool complete = false;      ///< false when some depth was unresolved
    int resolved_depth() const { return static_cast<int>(ids.size()) - 1; }
};

/// Chain of grid atlases for the preimages p^{-m}(Omega) of one component.
/// Level m labels the set {z : p^m(z) lands in the base component}, so the
/// induced map of components is "apply p once, look one level up".
class PreimageAtlasChain {
public:
    PreimageAtlasChain(const Polynomial& p, const ComponentAtlas& base, int base_component,
                       int levels, int max_iter = 400)
        : poly_(p) {
        GridSpec grid = base.grid;
        for (int m = 0; m <= levels; ++m) {
            LevelAtlas la;
            la.grid = grid;
            const std::size_t ncells = static_cast<std::size_t>(grid.nx) * grid.ny;
            la.labels.assign(ncells, kExteriorCell);
            std::vector<std::uint8_t> member(ncells, 0);
            parallel_for(ncells, [&](std::size_t i) {
                int ix = static_cast<int>(i % static_cast<std::size_t>(grid.nx));
                int iy = static_cast<int>(i / static_cast<std::size_t>(grid.nx));
                cpx z = grid.center(ix, iy);
                for (int it = 0; it < m; ++it) z = p.eval(z);
                auto id = base.component_of(z);
                member[i] = id && *id == base_component;
            });
            // flood fill into connected pieces
            std::int32_t next_id = 0;
            for (std::size_t start = 0; start < ncells; ++start) {
                if (!member[start] || la.labels[start] != kExteriorCell) continue;
                std::int32_t id = next_id++;
                std::deque<std::size_t> queue{start};
                la.labels[start] = id;
                la.representatives.push_back(grid.center(
                    static_cast<int>(start % static_cast<std::size_t>(grid.nx)),
                    static_cast<int>(start / static_cast<std::size_t>(grid.nx))));
                while (!queue.empty()) {
                    std::size_t cell = queue.front();
                    queue.pop_front();
                    int ix = static_cast<int>(cell % static_cast<std::size_t>(grid.nx));
                    int iy = static_cast<int>(cell / static_cast<std::size_t>(grid.nx));
                    const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
                    for (int k = 0; k < 4; ++k) {
                        int jx = ix + dx[k], jy = iy + dy[k];
                        if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
                        std::size_t nb = static_cast<std::size_t>(jy) * grid.nx + jx;
                        if (!member[nb] || la.labels[nb] != kExteriorCell) continue;
                        la.labels[nb] = id;
                        queue.push_back(nb);
                    }
                }
            }
            levels_.push_back(std::move(la));
        }
    }

    int levels() const { return static_cast<int>(levels_.size()) - 1; }

    std::optional<int> component_at(int level, cpx z) const {
        const LevelAtlas& la = levels_[static_cast<std::size_t>(level)];
        auto cell = la.grid.locate(z);
        if (!cell) return std::nullopt;
        std::int32_t l = la.labels[static_cast<std::size_t>(cell->second) * la.grid.nx + cell->first];
        if (l < 0) return std::nullopt;
        return static_cast<int>(l);
    }

    /// induced map pi_0(p): level-m component -> level-(m-1) component
    std::optional<int> induced_map(int level, int id) const {
        if (level < 1) return std::nullopt;
        cpx rep = levels_[static_cast<std::size_t>(level)].representatives[static_cast<std::size_t>(id)];
        return component_at(level - 1, poly_.eval(rep));
    }

private:
    struct LevelAtlas {
        GridSpec grid;
        std::vector<std::int32_t> labels;
        std::vector<cpx> representatives;   ///< first cell center per id
    };
    Polynomial poly_;
    std::vector<LevelAtlas> levels_;
};

/// Label of a history in the projective limit of pi_0(p^-m(Omega)): entry
/// z_{-i} is looked up in the level-i atlas. Compatibility with the induced
/// map is checked; an unresolved depth truncates the label.
inline ComponentLabel component_label(const History& h, const PreimageAtlasChain& chain) {
    ComponentLabel label;
    int depth = std::min(h.depth(), chain.levels());
    for (int i = 0; i <= depth; ++i) {
        auto id = chain.component_at(i, h.entry(i));
        if (!id) return label;
        if (i >= 1) {
            auto up = chain.induced_map(i, *id);
            if (!up || *up != label.ids[static_cast<std::size_t>(i - 1)]) return label;
        }
        label.ids.push_back(*id);
    }
    label.complete = (depth == h.depth());
    return label;
}

} // namespace limitlab
