#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "limitlab/natural_extension.hpp"
#include "limitlab/rational.hpp"

namespace limitlab {

// angle helpers, overloaded so the solenoid works in exact rational mode
// (property tests) and in floating mode (bulk numerics)
inline double angle_frac(double x) { return x - std::floor(x); }
inline Rational angle_frac(const Rational& x) { return x.frac(); }
inline std::int64_t angle_floor(double x) { return static_cast<std::int64_t>(std::floor(x)); }
inline std::int64_t angle_floor(const Rational& x) { return x.floor(); }
inline double angle_scale(double x, int n) { return x * n; }
inline Rational angle_scale(const Rational& x, int n) { return x * Rational(n); }
inline double angle_shrink(double x, std::int64_t k, int n) { return (x + static_cast<double>(k)) / n; }
inline Rational angle_shrink(const Rational& x, std::int64_t k, int n) {
    return (x + Rational(k)) / Rational(n);
}
inline double angle_value(double x) { return x; }
inline double angle_value(const Rational& x) { return x.to_double(); }

/// integer content of an angle expression; exact in rational mode
inline std::optional<std::int64_t> angle_as_int(double t, double tol) {
    std::int64_t k = std::llround(t);
    if (std::abs(t - static_cast<double>(k)) > tol) return std::nullopt;
    return k;
}
inline std::optional<std::int64_t> angle_as_int(const Rational& t, double) {
    if (t.den() != 1) return std::nullopt;
    return t.num();
}

/// Point of the depth-N truncated solenoid over z -> z^n: head angle theta0
/// in [0,1) plus the branch digits k_1..k_N, each in {0,...,n-1}. The derived
/// backward angles are theta_{-i} = (theta_{-i+1} + k_i)/n.
template <class Angle>
struct SolenoidPoint {
    Angle theta0{};
    std::vector<int> digits;
    int base = 2;

    int depth() const { return static_cast<int>(digits.size()); }

    bool operator==(const SolenoidPoint& o) const {
        return base == o.base && theta0 == o.theta0 && digits == o.digits;
    }

    /// theta_0, theta_-1, ..., theta_-N
    std::vector<Angle> angle_tower() const {
        std::vector<Angle> tower{theta0};
        for (int d : digits) tower.push_back(angle_shrink(tower.back(), d, base));
        return tower;
    }
};

template <class Angle>
void check_digits(const SolenoidPoint<Angle>& s) {
    if (s.base < 2) throw std::invalid_argument("solenoid: base must be >= 2");
    for (int d : s.digits)
        if (d < 0 || d >= s.base) throw std::invalid_argument("solenoid: digit out of range");
}

/// Forward map induced by z -> z^n: the head angle multiplies, the consumed
/// branch becomes the new leading digit, the deepest digit drops (fixed N).
template <class Angle>
SolenoidPoint<Angle> solenoid_shift(const SolenoidPoint<Angle>& s) {
    check_digits(s);
    SolenoidPoint<Angle> out;
    out.base = s.base;
    Angle t = angle_scale(s.theta0, s.base);
    std::int64_t lead = angle_floor(t);
    out.theta0 = t - Angle(lead);
    out.digits.reserve(s.digits.size());
    out.digits.push_back(static_cast<int>(lead));
    for (std::size_t i = 0; i + 1 < s.digits.size(); ++i) out.digits.push_back(s.digits[i]);
    if (out.digits.size() > s.digits.size()) out.digits.resize(s.digits.size());
    return out;
}

/// Backward map. With stored digits the head walks its own tower (the head
/// digit is consumed) and the choice k refills the deepest slot, so
/// shift(unshift(s,k)) == s for every k and unshift(shift(s), dropped digit)
/// restores the point. A depth-0 point has no stored tower; there k chooses
/// the preimage branch of the head directly.
template <class Angle>
SolenoidPoint<Angle> solenoid_unshift(const SolenoidPoint<Angle>& s, int k) {
    check_digits(s);
    if (k < 0 || k >= s.base) throw std::invalid_argument("solenoid_unshift: digit out of range");
    SolenoidPoint<Angle> out;
    out.base = s.base;
    if (s.digits.empty()) {
        out.theta0 = angle_shrink(s.theta0, k, s.base);
        return out;
    }
    out.theta0 = angle_shrink(s.theta0, s.digits.front(), s.base);
    out.digits.assign(s.digits.begin() + 1, s.digits.end());
    out.digits.push_back(k);
    return out;
}

/// Rebuild a point from an explicit angle tower; every consecutive pair must
/// satisfy the digit relation exactly (rational mode) or within tol.
template <class Angle>
SolenoidPoint<Angle> from_angle_tower(const std::vector<Angle>& tower, int base, double tol = 1e-9) {
    if (tower.empty()) throw std::invalid_argument("from_angle_tower: empty tower");
    SolenoidPoint<Angle> s;
    s.base = base;
    s.theta0 = tower.front();
    for (std::size_t i = 1; i < tower.size(); ++i) {
        auto k = angle_as_int(angle_scale(tower[i], base) - tower[i - 1], tol);
        if (!k)
            throw std::invalid_argument("from_angle_tower: angles do not satisfy the digit relation");
        s.digits.push_back(static_cast<int>(((*k % base) + base) % base));
    }
    return s;
}

/// Cone over the solenoid: radius plus solenoid point; r = 0 is the cone
/// point and forgets the angular data.
template <class Angle>
struct ConePoint {
    double r = 0.0;
    SolenoidPoint<Angle> s;
};

/// The model dynamics on the cone: (r, s) -> (r^n, shift s).
template <class Angle>
ConePoint<Angle> cone_shift(const ConePoint<Angle>& c) {
    return {std::pow(c.r, c.s.base), solenoid_shift(c.s)};
}

/// Distance respecting the cone collapse at r = 0: the angular part is
/// weighted by the larger radius, over the common depth.
template <class Angle>
double cone_distance(const ConePoint<Angle>& a, const ConePoint<Angle>& b) {
    double d = std::abs(a.r - b.r);
    double w = std::max(a.r, b.r);
    if (w == 0.0) return d;
    auto ta = a.s.angle_tower();
    auto tb = b.s.angle_tower();
    std::size_t common = std::min(ta.size(), tb.size());
    double ang = 0.0;
    for (std::size_t i = 0; i < common; ++i) {
        double diff = std::abs(angle_value(ta[i]) - angle_value(tb[i]));
        diff = std::min(diff, 1.0 - diff);
        ang = std::max(ang, diff);
    }
    if (a.s.base != b.s.base) ang = 1.0;
    return d + w * ang;
}

template <class Angle>
bool cone_equal(const ConePoint<Angle>& a, const ConePoint<Angle>& b, double tol = 0.0) {
    return cone_distance(a, b) <= tol;
}

/// Polar encoding of a history of p0 = z^n: in polar coordinates p0
/// decouples, the radius history is forced by unique positive roots, and the
/// angles carry the branch digits. All-zero histories collapse to the cone
/// point; mixed zero/nonzero entries are not a valid p0 history.
inline ConePoint<double> encode_history_p0(const History& h, int base, double tol = 1e-9) {
    const auto& e = h.entries();
    bool all_zero = true, any_zero = false;
    for (const cpx& z : e) {
        if (z == cpx(0.0, 0.0)) any_zero = true;
        else all_zero = false;
    }
    if (any_zero && !all_zero)
        throw std::invalid_argument("encode_history_p0: mixed zero and nonzero entries");
    ConePoint<double> c;
    c.s.base = base;
    if (all_zero) {
        c.r = 0.0;
        c.s.theta0 = 0.0;
        c.s.digits.assign(static_cast<std::size_t>(h.depth()), 0);
        return c;
    }
    c.r = std::abs(e.front());
    std::vector<double> tower;
    tower.reserve(e.size());
    for (const cpx& z : e) {
        double t = std::arg(z) / (2.0 * M_PI);
        if (t < 0.0) t += 1.0;
        tower.push_back(t);
    }
    c.s = from_angle_tower(tower, base, tol);
    return c;
}

/// Inverse of the polar encoding: entries z_{-i} = r^(1/n^i) e^(2 pi i theta_-i).
/// Radii walk down by repeated positive n-th roots, the forced law.
inline History decode(const ConePoint<double>& c, int depth_n) {
    if (depth_n < 0 || depth_n > c.s.depth())
        throw std::invalid_argument("decode: depth exceeds stored digits");
    std::vector<cpx> entries;
    entries.reserve(static_cast<std::size_t>(depth_n) + 1);
    if (c.r == 0.0) {
        entries.assign(static_cast<std::size_t>(depth_n) + 1, cpx(0.0, 0.0));
        return History::unchecked(std::move(entries), true);
    }
    auto tower = c.s.angle_tower();
    double radius = c.r;
    for (int i = 0; i <= depth_n; ++i) {
        entries.push_back(std::polar(radius, 2.0 * M_PI * tower[static_cast<std::size_t>(i)]));
        radius = std::pow(radius, 1.0 / c.s.base);
    }
    return History::unchecked(std::move(entries));
}

inline History decode(const ConePoint<double>& c) { return decode(c, c.s.depth()); }

// ---- serialization ----

inline nlohmann::json to_json(const SolenoidPoint<Rational>& s) {
    nlohmann::json j;
    j["theta0"] = s.theta0.str();
    j["digits"] = s.digits;
    j["base"] = s.base;
    return j;
}

inline nlohmann::json to_json(const SolenoidPoint<double>& s) {
    nlohmann::json j;
    j["theta0"] = s.theta0;
    j["digits"] = s.digits;
    j["base"] = s.base;
    return j;
}

} // namespace limitlab
