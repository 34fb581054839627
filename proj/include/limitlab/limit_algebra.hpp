#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitlab/fatou.hpp"

namespace limitlab {

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("limit_algebra: overflow");
    return static_cast<std::int64_t>(r);
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    __int128 r = static_cast<__int128>(a) + b;
    if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("limit_algebra: overflow");
    return static_cast<std::int64_t>(r);
}

} // namespace detail

/// Element of Z[1/m] in normal form: numerator / m^exponent with exponent = 0
/// or m not dividing the numerator.
class LocalizedInteger {
public:
    LocalizedInteger() = default;
    LocalizedInteger(std::int64_t numerator, int exponent, int base) : num_(numerator), exp_(exponent), m_(base) {
        if (base < 2) throw std::invalid_argument("LocalizedInteger: base must be >= 2");
        if (exponent < 0) throw std::invalid_argument("LocalizedInteger: exponent must be >= 0");
        normalize();
    }
    static LocalizedInteger integer(std::int64_t n, int base) { return LocalizedInteger(n, 0, base); }

    std::int64_t numerator() const { return num_; }
    int exponent() const { return exp_; }
    int base() const { return m_; }

    friend LocalizedInteger operator+(const LocalizedInteger& a, const LocalizedInteger& b) {
        a.require_same_base(b);
        int e = std::max(a.exp_, b.exp_);
        std::int64_t an = a.num_, bn = b.num_;
        for (int i = a.exp_; i < e; ++i) an = detail::checked_mul(an, a.m_);
        for (int i = b.exp_; i < e; ++i) bn = detail::checked_mul(bn, b.m_);
        return LocalizedInteger(detail::checked_add(an, bn), e, a.m_);
    }
    LocalizedInteger operator-() const { return LocalizedInteger(-num_, exp_, m_); }
    friend LocalizedInteger operator-(const LocalizedInteger& a, const LocalizedInteger& b) {
        return a + (-b);
    }
    /// scale by an ordinary integer
    friend LocalizedInteger operator*(const LocalizedInteger& a, std::int64_t s) {
        return LocalizedInteger(detail::checked_mul(a.num_, s), a.exp_, a.m_);
    }

    friend bool operator==(const LocalizedInteger& a, const LocalizedInteger& b) {
        return a.m_ == b.m_ && a.num_ == b.num_ && a.exp_ == b.exp_;
    }
    friend bool operator!=(const LocalizedInteger& a, const LocalizedInteger& b) { return !(a == b); }

    bool is_zero() const { return num_ == 0; }
    std::string str() const {
        if (exp_ == 0) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(m_) + "^" + std::to_string(exp_);
    }

private:
    void require_same_base(const LocalizedInteger& o) const {
        if (m_ != o.m_) throw std::invalid_argument("LocalizedInteger: mixed bases");
    }
    void normalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        while (exp_ > 0 && num_ % m_ == 0) {
            num_ /= m_;
            --exp_;
        }
    }

    std::int64_t num_ = 0;
    int exp_ = 0;
    int m_ = 2;
};

/// Representative (level, value) of the direct limit Z ->(xm) Z ->(xm) ...;
/// (level, v) ~ (level+1, m v). Normal form: level = 0 or m not dividing v.
/// The value map (level, v) -> v / m^level identifies the limit with Z[1/m].
class LimitGroupElement {
public:
    LimitGroupElement() = default;
    LimitGroupElement(int level, std::int64_t value, int multiplier)
        : level_(level), value_(value), m_(multiplier) {
        if (multiplier < 2) throw std::invalid_argument("LimitGroupElement: multiplier must be >= 2");
        if (level < 0) throw std::invalid_argument("LimitGroupElement: level must be >= 0");
        normalize();
    }

    int level() const { return level_; }
    std::int64_t value() const { return value_; }
    int multiplier() const { return m_; }

    friend LimitGroupElement operator+(const LimitGroupElement& a, const LimitGroupElement& b) {
        if (a.m_ != b.m_) throw std::invalid_argument("LimitGroupElement: mixed multipliers");
        int level = std::max(a.level_, b.level_);
        std::int64_t av = a.value_, bv = b.value_;
        for (int i = a.level_; i < level; ++i) av = detail::checked_mul(av, a.m_);
        for (int i = b.level_; i < level; ++i) bv = detail::checked_mul(bv, b.m_);
        return LimitGroupElement(level, detail::checked_add(av, bv), a.m_);
    }
    LimitGroupElement operator-() const { return LimitGroupElement(level_, -value_, m_); }

    friend bool operator==(const LimitGroupElement& a, const LimitGroupElement& b) {
        return a.m_ == b.m_ && a.level_ == b.level_ && a.value_ == b.value_;
    }
    friend bool operator!=(const LimitGroupElement& a, const LimitGroupElement& b) { return !(a == b); }

    /// the isomorphism onto Z[1/m]
    LocalizedInteger as_localized() const { return LocalizedInteger(value_, level_, m_); }

private:
    void normalize() {
        if (value_ == 0) {
            level_ = 0;
            return;
        }
        while (level_ > 0 && value_ % m_ == 0) {
            value_ /= m_;
            --level_;
        }
    }

    int level_ = 0;
    std::int64_t value_ = 0;
    int m_ = 2;
};

inline bool limit_equal(const LimitGroupElement& a, const LimitGroupElement& b) { return a == b; }

/// Finite component graph: the combinatorial shadow of pi_0 of the interior
/// with the induced map, degrees, small-diameter flags and the distinguished
/// fixed components.
struct ComponentGraph {
    int nodes = 0;
    std::vector<int> forward;   ///< p_*: node -> node, total
    std::vector<int> degree;    ///< k(X)
    std::vector<bool> small;    ///< diameter < delta, the set X'
    std::vector<int> x0;        ///< components with attracting fixed points

    void validate() const {
        if (static_cast<int>(forward.size()) != nodes || static_cast<int>(degree.size()) != nodes ||
            static_cast<int>(small.size()) != nodes)
            throw std::invalid_argument("ComponentGraph: field sizes disagree");
        for (int t : forward)
            if (t < 0 || t >= nodes) throw std::invalid_argument("ComponentGraph: p_* not total");
        for (int x : x0) {
            if (x < 0 || x >= nodes) throw std::invalid_argument("ComponentGraph: bad X0 entry");
            if (forward[static_cast<std::size_t>(x)] != x)
                throw std::invalid_argument("ComponentGraph: X0 must be fixed by p_*");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["nodes"] = nodes;
        j["map"] = forward;
        j["k"] = degree;
        nlohmann::json sm = nlohmann::json::array();
        for (bool b : small) sm.push_back(b);
        j["small"] = std::move(sm);
        j["X0"] = x0;
        return j;
    }
    static ComponentGraph from_json(const nlohmann::json& j) {
        ComponentGraph g;
        g.nodes = j.at("nodes");
        g.forward = j.at("map").get<std::vector<int>>();
        g.degree = j.at("k").get<std::vector<int>>();
        for (const auto& b : j.at("small")) g.small.push_back(b.get<bool>());
        g.x0 = j.at("X0").get<std::vector<int>>();
        g.validate();
        return g;
    }
};

/// Build the component graph of an atlas: forward map from component_map,
/// small flags from diameters against delta, X0 from fixed components holding
/// attracting cycle points.
inline ComponentGraph component_graph(const Polynomial& p, const ComponentAtlas& atlas, double delta) {
    ComponentGraph g;
    g.nodes = static_cast<int>(atlas.components.size());
    ComponentMap cm = component_map(p, atlas);
    for (int i = 0; i < g.nodes; ++i) {
        auto t = cm.target[static_cast<std::size_t>(i)];
        if (!t) throw std::runtime_error("component_graph: unresolved component image");
        g.forward.push_back(*t);
        g.degree.push_back(atlas.components[static_cast<std::size_t>(i)].degree);
        g.small.push_back(atlas.components[static_cast<std::size_t>(i)].diameter < delta);
        if (atlas.components[static_cast<std::size_t>(i)].cycle_point && *t == i) g.x0.push_back(i);
    }
    g.validate();
    return g;
}

/// Descriptor of the split summand of H_1: one Z[1/k(X)] coordinate per
/// distinguished component, with the generator inclusion bookkeeping. The
/// inclusion into H_1 is a split injection but not onto; the cokernel is not
/// modeled.
struct H1Model {
    struct Summand {
        int component = 0;
        int k = 2;
        std::string generator;   ///< boundary-curve generator at inductive level 0
    };
    std::vector<Summand> summands;

    using Element = std::vector<LocalizedInteger>;

    Element zero() const {
        Element e;
        for (const Summand& s : summands) e.push_back(LocalizedInteger::integer(0, s.k));
        return e;
    }
    /// inclusion of a single-summand value
    Element include(int index, const LocalizedInteger& v) const {
        Element e = zero();
        e[static_cast<std::size_t>(index)] = v;
        return e;
    }
    /// projection back onto one summand
    LocalizedInteger project(const Element& e, int index) const {
        return e[static_cast<std::size_t>(index)];
    }
    Element add(const Element& a, const Element& b) const {
        Element e;
        for (std::size_t i = 0; i < summands.size(); ++i) e.push_back(a[i] + b[i]);
        return e;
    }
    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < summands.size(); ++i) {
            if (i) s += " + ";
            s += "Z[1/" + std::to_string(summands[i].k) + "]";
        }
        return s.empty() ? "0" : s;
    }
};

/// The split summand of Thm-style H_1 bookkeeping over the distinguished
/// components. Degrees below 2 cannot occur on components with attracting
/// fixed points (a degree-1 proper self-map of a disk cannot attract).
inline H1Model h1_model(const ComponentGraph& g) {
    g.validate();
    if (g.x0.empty()) throw std::invalid_argument("h1_model: X0 is empty");
    H1Model model;
    for (int x : g.x0) {
        int k = g.degree[static_cast<std::size_t>(x)];
        if (k < 2)
            throw std::invalid_argument("h1_model: component in X0 with degree < 2");
        H1Model::Summand s;
        s.component = x;
        s.k = k;
        s.generator = "[boundary(" + std::to_string(x) + ")] at level 0";
        model.summands.push_back(std::move(s));
    }
    return model;
}

/// Signed loop symbol e_i^{+-1} of the earring winding map.
struct LoopSymbol {
    int index = 1;   ///< 1-based circle index
    int sign = 1;
};

/// Winding vector of a word in the earring loops: per-circle signed counts.
/// A homomorphism under concatenation; commutators land on zero.
inline std::vector<std::int64_t> winding_vector(const std::vector<LoopSymbol>& word, int support) {
    std::vector<std::int64_t> v(static_cast<std::size_t>(support), 0);
    for (const LoopSymbol& s : word) {
        if (s.index < 1 || s.index > support)
            throw std::invalid_argument("winding_vector: index out of support");
        if (s.sign != 1 && s.sign != -1) throw std::invalid_argument("winding_vector: sign must be +-1");
        v[static_cast<std::size_t>(s.index - 1)] += s.sign;
    }
    return v;
}

struct CoveringWitness {
    int node = 0;
    int from = -1;   ///< small node whose forward orbit hits this node
    int steps = -1;
};

struct CoveringVerdict {
    enum class Kind { Trivial, Inconclusive } kind = Kind::Inconclusive;
    std::vector<CoveringWitness> trace;
    std::optional<int> offending_node;
};

/// Combinatorial core of the covering-triviality argument: every component
/// must be hit by the forward orbit of a small component (over whose boundary
/// any cover is trivial). Witnesses record the small origin and the step
/// count; k = 0 (the node is itself small) counts.
inline CoveringVerdict covering_trivial(const ComponentGraph& g) {
    g.validate();
    CoveringVerdict verdict;
    std::vector<CoveringWitness> witness(static_cast<std::size_t>(g.nodes));
    for (int i = 0; i < g.nodes; ++i) witness[static_cast<std::size_t>(i)] = {i, -1, -1};

    for (int s = 0; s < g.nodes; ++s) {
        if (!g.small[static_cast<std::size_t>(s)]) continue;
        int cur = s;
        // forward orbit of a node enters a cycle within g.nodes steps
        for (int k = 0; k <= g.nodes; ++k) {
            CoveringWitness& w = witness[static_cast<std::size_t>(cur)];
            if (w.steps < 0 || k < w.steps) w = {cur, s, k};
            cur = g.forward[static_cast<std::size_t>(cur)];
        }
    }

    verdict.kind = CoveringVerdict::Kind::Trivial;
    for (int i = 0; i < g.nodes; ++i) {
        if (witness[static_cast<std::size_t>(i)].steps < 0) {
            verdict.kind = CoveringVerdict::Kind::Inconclusive;
            if (!verdict.offending_node) verdict.offending_node = i;
        }
    }
    verdict.trace = std::move(witness);
    return verdict;
}

inline nlohmann::json to_json(const CoveringVerdict& v) {
    nlohmann::json j;
    j["verdict"] = v.kind == CoveringVerdict::Kind::Trivial ? "TRIVIAL" : "INCONCLUSIVE";
    if (v.offending_node) j["offending_node"] = *v.offending_node;
    nlohmann::json trace = nlohmann::json::array();
    for (const CoveringWitness& w : v.trace)
        trace.push_back({{"node", w.node}, {"from", w.from}, {"steps", w.steps}});
    j["trace"] = std::move(trace);
    return j;
}

} // namespace limitlab
