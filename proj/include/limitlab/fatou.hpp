#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitlab/cycles.hpp"
#include "limitlab/parallel.hpp"
#include "limitlab/roots.hpp"

namespace limitlab {

/// Escape-time verdict for one starting point.
struct OrbitClass {
    bool escaped = false;
    int escape_step = 0;      ///< valid when escaped
    double escape_radius = 0.0;

    bool bounded() const { return !escaped; }
};

/// Filled-Julia membership at desk budget: Escaped(n) means |p^n(z)| > R with
/// every earlier iterate inside; Bounded means the budget ran out first.
inline OrbitClass classify_point(const Polynomial& p, cpx z, double escape_radius, int max_iter) {
    OrbitClass oc;
    oc.escape_radius = escape_radius;
    for (int n = 0; n <= max_iter; ++n) {
        if (std::abs(z) > escape_radius) {
            oc.escaped = true;
            oc.escape_step = n;
            return oc;
        }
        z = p.eval(z);
    }
    return oc;
}

inline OrbitClass classify_point(const Polynomial& p, cpx z, int max_iter = 400) {
    return classify_point(p, z, p.escape_radius(), max_iter);
}

/// Rectangular sampling grid.
struct GridSpec {
    double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;
    int nx = 512, ny = 512;

    cpx center(int ix, int iy) const {
        double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
        return {x0 + (ix + 0.5) * dx, y0 + (iy + 0.5) * dy};
    }
    std::optional<std::pair<int, int>> locate(cpx z) const {
        double fx = (z.real() - x0) / (x1 - x0) * nx;
        double fy = (z.imag() - y0) / (y1 - y0) * ny;
        int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return std::nullopt;
        return std::make_pair(ix, iy);
    }
    double cell_diag() const {
        double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
        return std::hypot(dx, dy);
    }
    std::string str() const {
        return format_double(x0) + "," + format_double(x1) + "," + format_double(y0) + "," +
               format_double(y1) + "," + std::to_string(nx) + "," + std::to_string(ny);
    }
};

constexpr std::int32_t kExteriorCell = -1;
constexpr std::int32_t kDiscardedCell = -2;

struct ComponentInfo {
    int id = 0;
    cpx representative{0.0, 0.0};       ///< deepest-interior cell center
    std::optional<cpx> cycle_point;     ///< an attracting cycle point inside, if any
    int degree = 0;                     ///< k(X)
    bool self_mapped = false;
    bool degree_is_heuristic = false;   ///< sampled sheet count, not Riemann-Hurwitz
    std::int64_t cell_count = 0;
    double diameter = 0.0;              ///< bounding-box diagonal, desk proxy
};

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid surrogate for pi_0 of the filled-Julia interior: connected labeling of
/// bounded cells plus per-component bookkeeping.
struct ComponentAtlas {
    GridSpec grid;
    double escape_radius = 0.0;
    int max_iter = 0;
    std::vector<std::int32_t> labels;   ///< nx*ny, component id / kExteriorCell / kDiscardedCell
    std::vector<ComponentInfo> components;

    std::int32_t label_at(int ix, int iy) const {
        return labels[static_cast<std::size_t>(iy) * grid.nx + ix];
    }

    /// component id containing z, if any
    std::optional<int> component_of(cpx z) const {
        auto cell = grid.locate(z);
        if (!cell) return std::nullopt;
        std::int32_t l = label_at(cell->first, cell->second);
        if (l < 0) return std::nullopt;
        return static_cast<int>(l);
    }

    nlohmann::json to_json() const;
    static ComponentAtlas from_json(const nlohmann::json& j);
};

namespace detail {

/// Multi-source BFS depth from the component boundary; the deepest cell makes
/// a robustly interior representative. Ties break to the smallest index.
inline std::size_t deepest_cell(const std::vector<std::int32_t>& labels, int nx, int ny, std::int32_t id,
                                const std::vector<std::size_t>& member_cells) {
    std::vector<std::int32_t> depth(labels.size(), -1);
    std::deque<std::size_t> queue;
    auto is_member = [&](int ix, int iy) {
        return ix >= 0 && iy >= 0 && ix < nx && iy < ny &&
               labels[static_cast<std::size_t>(iy) * nx + ix] == id;
    };
    for (std::size_t cell : member_cells) {
        int ix = static_cast<int>(cell % static_cast<std::size_t>(nx));
        int iy = static_cast<int>(cell / static_cast<std::size_t>(nx));
        if (!is_member(ix - 1, iy) || !is_member(ix + 1, iy) || !is_member(ix, iy - 1) ||
            !is_member(ix, iy + 1)) {
            depth[cell] = 0;
            queue.push_back(cell);
        }
    }
    if (queue.empty() && !member_cells.empty()) {
        depth[member_cells[0]] = 0;
        queue.push_back(member_cells[0]);
    }
    std::size_t best = member_cells[0];
    while (!queue.empty()) {
        std::size_t cell = queue.front();
        queue.pop_front();
        if (depth[cell] > depth[best] || (depth[cell] == depth[best] && cell < best)) best = cell;
        int ix = static_cast<int>(cell % static_cast<std::size_t>(nx));
        int iy = static_cast<int>(cell / static_cast<std::size_t>(nx));
        const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            int jx = ix + dx[k], jy = iy + dy[k];
            if (!is_member(jx, jy)) continue;
            std::size_t nb = static_cast<std::size_t>(jy) * nx + jx;
            if (depth[nb] >= 0) continue;
            depth[nb] = depth[cell] + 1;
            queue.push_back(nb);
        }
    }
    return best;
}

} // namespace detail

/// Connected labeling of bounded grid cells (4-connectivity). Components with
/// fewer than min_cells cells are dropped as grid noise. Degrees k(X) use
/// Riemann-Hurwitz (1 + interior critical points) on self-mapped components
/// and a sampled sheet count elsewhere. Throws ResolutionError when an
/// attracting cycle point of p fails to land in a kept component.
inline ComponentAtlas interior_components(const Polynomial& p, const GridSpec& grid,
                                          int max_iter = 400, int min_cells = 2) {
    p.require_dynamical("interior_components");
    ComponentAtlas atlas;
    atlas.grid = grid;
    atlas.max_iter = max_iter;
    atlas.escape_radius = p.escape_radius();

    const std::size_t ncells = static_cast<std::size_t>(grid.nx) * grid.ny;
    std::vector<std::uint8_t> bounded(ncells, 0);
    parallel_for(ncells, [&](std::size_t i) {
        int ix = static_cast<int>(i % static_cast<std::size_t>(grid.nx));
        int iy = static_cast<int>(i / static_cast<std::size_t>(grid.nx));
        bounded[i] = classify_point(p, grid.center(ix, iy), atlas.escape_radius, max_iter).bounded();
    });

    // flood fill
    atlas.labels.assign(ncells, kExteriorCell);
    std::vector<std::vector<std::size_t>> member_cells;
    for (std::size_t start = 0; start < ncells; ++start) {
        if (!bounded[start] || atlas.labels[start] != kExteriorCell) continue;
        std::int32_t id = static_cast<std::int32_t>(member_cells.size());
        member_cells.emplace_back();
        std::deque<std::size_t> queue{start};
        atlas.labels[start] = id;
        while (!queue.empty()) {
            std::size_t cell = queue.front();
            queue.pop_front();
            member_cells.back().push_back(cell);
            int ix = static_cast<int>(cell % static_cast<std::size_t>(grid.nx));
            int iy = static_cast<int>(cell / static_cast<std::size_t>(grid.nx));
            const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                int jx = ix + dx[k], jy = iy + dy[k];
                if (jx < 0 || jy < 0 || jx >= grid.nx || jy >= grid.ny) continue;
                std::size_t nb = static_cast<std::size_t>(jy) * grid.nx + jx;
                if (!bounded[nb] || atlas.labels[nb] != kExteriorCell) continue;
                atlas.labels[nb] = id;
                queue.push_back(nb);
            }
        }
    }

    // noise filter + dense re-id
    std::vector<std::int32_t> remap(member_cells.size(), kDiscardedCell);
    std::int32_t next_id = 0;
    for (std::size_t c = 0; c < member_cells.size(); ++c)
        if (static_cast<int>(member_cells[c].size()) >= min_cells) remap[c] = next_id++;
    for (std::size_t i = 0; i < ncells; ++i)
        if (atlas.labels[i] >= 0) atlas.labels[i] = remap[static_cast<std::size_t>(atlas.labels[i])];

    std::vector<std::vector<std::size_t>> kept;
    kept.resize(static_cast<std::size_t>(next_id));
    for (std::size_t c = 0; c < member_cells.size(); ++c)
        if (remap[c] >= 0) kept[static_cast<std::size_t>(remap[c])] = std::move(member_cells[c]);

    auto cycles = find_attracting_cycles(p, 16, 8, std::max(max_iter, 2000));
    std::vector<cpx> crit = critical_points(p);

    for (std::int32_t id = 0; id < next_id; ++id) {
        ComponentInfo info;
        info.id = id;
        info.cell_count = static_cast<std::int64_t>(kept[static_cast<std::size_t>(id)].size());

        double lox = 1e300, hix = -1e300, loy = 1e300, hiy = -1e300;
        for (std::size_t cell : kept[static_cast<std::size_t>(id)]) {
            int ix = static_cast<int>(cell % static_cast<std::size_t>(grid.nx));
            int iy = static_cast<int>(cell / static_cast<std::size_t>(grid.nx));
            cpx z = grid.center(ix, iy);
            lox = std::min(lox, z.real());
            hix = std::max(hix, z.real());
            loy = std::min(loy, z.imag());
            hiy = std::max(hiy, z.imag());
        }
        info.diameter = std::hypot(hix - lox, hiy - loy) + grid.cell_diag();

        std::size_t rep = detail::deepest_cell(atlas.labels, grid.nx, grid.ny, id,
                                               kept[static_cast<std::size_t>(id)]);
        info.representative = grid.center(static_cast<int>(rep % static_cast<std::size_t>(grid.nx)),
                                          static_cast<int>(rep / static_cast<std::size_t>(grid.nx)));
        atlas.components.push_back(info);
    }

    // attach attracting cycle points; a cycle point in a dropped/exterior cell
    // means the grid is too coarse to be trusted
    for (const Cycle& cyc : cycles.cycles) {
        for (const cpx& q : cyc.points) {
            auto id = atlas.component_of(q);
            if (!id)
                throw ResolutionError("interior_components: attracting cycle point " +
                                      format_complex(q) + " not resolved by the grid");
            if (!atlas.components[static_cast<std::size_t>(*id)].cycle_point)
                atlas.components[static_cast<std::size_t>(*id)].cycle_point = q;
        }
    }

    // degrees
    for (ComponentInfo& info : atlas.components) {
        cpx image = p.eval(info.representative);
        auto target = atlas.component_of(image);
        info.self_mapped = target && *target == info.id;
        if (info.self_mapped) {
            int inside = 0;
            for (const cpx& c0 : crit) {
                auto cid = atlas.component_of(c0);
                if (cid && *cid == info.id) ++inside;
            }
            info.degree = 1 + inside;
        } else {
            // sampled sheet count: preimages of p(rep) that land back in this component
            info.degree_is_heuristic = true;
            int sheets = 0;
            for (const cpx& w : preimages(p, image)) {
                auto cid = atlas.component_of(w);
                if (cid && *cid == info.id) ++sheets;
            }
            info.degree = std::max(1, sheets);
        }
    }
    return atlas;
}

/// Target of each component under p: id -> id, with unresolved images flagged.
struct ComponentMap {
    std::vector<std::optional<int>> target;   ///< index by component id; nullopt = unresolved

    bool total() const {
        for (const auto& t : target)
            if (!t) return false;
        return true;
    }
};

inline ComponentMap component_map(const Polynomial& p, const ComponentAtlas& atlas) {
    ComponentMap cm;
    cm.target.resize(atlas.components.size());
    for (std::size_t i = 0; i < atlas.components.size(); ++i) {
        cpx anchor = atlas.components[i].cycle_point ? *atlas.components[i].cycle_point
                                                     : atlas.components[i].representative;
        cm.target[i] = atlas.component_of(p.eval(anchor));
    }
    return cm;
}

// ---- serialization (versioned, labels run-length encoded) ----

inline nlohmann::json ComponentAtlas::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["grid"] = {{"x0", grid.x0}, {"x1", grid.x1}, {"y0", grid.y0},
                 {"y1", grid.y1}, {"nx", grid.nx}, {"ny", grid.ny}};
    j["escape_radius"] = escape_radius;
    j["max_iter"] = max_iter;
    nlohmann::json runs = nlohmann::json::array();
    std::size_t i = 0;
    while (i < labels.size()) {
        std::size_t j2 = i;
        while (j2 < labels.size() && labels[j2] == labels[i]) ++j2;
        runs.push_back({labels[i], j2 - i});
        i = j2;
    }
    j["labels_rle"] = std::move(runs);
    nlohmann::json comps = nlohmann::json::array();
    for (const ComponentInfo& c : components) {
        nlohmann::json jc;
        jc["id"] = c.id;
        jc["representative"] = {c.representative.real(), c.representative.imag()};
        if (c.cycle_point) jc["cycle_point"] = {c.cycle_point->real(), c.cycle_point->imag()};
        jc["degree"] = c.degree;
        jc["self_mapped"] = c.self_mapped;
        jc["degree_is_heuristic"] = c.degree_is_heuristic;
        jc["cell_count"] = c.cell_count;
        jc["diameter"] = c.diameter;
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    return j;
}

inline ComponentAtlas ComponentAtlas::from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1) throw std::runtime_error("atlas: unknown version");
    ComponentAtlas a;
    const auto& g = j.at("grid");
    a.grid = {g.at("x0"), g.at("x1"), g.at("y0"), g.at("y1"), g.at("nx"), g.at("ny")};
    a.escape_radius = j.at("escape_radius");
    a.max_iter = j.at("max_iter");
    for (const auto& run : j.at("labels_rle")) {
        std::int32_t v = run[0];
        std::size_t count = run[1];
        a.labels.insert(a.labels.end(), count, v);
    }
    for (const auto& jc : j.at("components")) {
        ComponentInfo c;
        c.id = jc.at("id");
        c.representative = {jc.at("representative")[0], jc.at("representative")[1]};
        if (jc.contains("cycle_point"))
            c.cycle_point = cpx(jc.at("cycle_point")[0], jc.at("cycle_point")[1]);
        c.degree = jc.at("degree");
        c.self_mapped = jc.at("self_mapped");
        c.degree_is_heuristic = jc.at("degree_is_heuristic");
        c.cell_count = jc.at("cell_count");
        c.diameter = jc.at("diameter");
        a.components.push_back(c);
    }
    return a;
}

} // namespace limitlab
