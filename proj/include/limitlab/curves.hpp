#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "limitlab/complex_io.hpp"

namespace limitlab {

/// Closed curve sampled at M cyclically ordered parameters j/M.
struct ClosedCurve {
    std::vector<cpx> samples;

    int size() const { return static_cast<int>(samples.size()); }

    const cpx& at_index(int j) const {
        int m = size();
        return samples[static_cast<std::size_t>(((j % m) + m) % m)];
    }

    /// linear interpolation at parameter theta (mod 1)
    cpx at_param(double theta) const {
        int m = size();
        double t = (theta - std::floor(theta)) * m;
        int j = static_cast<int>(t);
        double f = t - j;
        return at_index(j) * (1.0 - f) + at_index(j + 1) * f;
    }

    /// polygonal winding number about z0
    int winding_about(cpx z0) const {
        double total = 0.0;
        int m = size();
        for (int j = 0; j < m; ++j) {
            cpx a = at_index(j) - z0, b = at_index(j + 1) - z0;
            total += std::arg(b / a);
        }
        return static_cast<int>(std::lround(total / (2.0 * M_PI)));
    }

    double min_pairwise_gap() const {
        double best = 1e300;
        int m = size();
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                best = std::min(best, std::abs(samples[static_cast<std::size_t>(i)] -
                                               samples[static_cast<std::size_t>(j)]));
        return best;
    }
};

/// Geometric-angle lookup for a star-shaped closed curve: given a direction
/// about the center, returns the interpolated curve point and its parameter.
/// Used to fiber annuli between consecutive curves.
class StarView {
public:
    StarView() = default;
    StarView(const ClosedCurve& curve, cpx center) : center_(center) {
        const int m = curve.size();
        entries_.reserve(static_cast<std::size_t>(m));
        double prev = 0.0;
        for (int j = 0; j < m; ++j) {
            cpx rel = curve.samples[static_cast<std::size_t>(j)] - center_;
            double ang = std::arg(rel) / (2.0 * M_PI);   // in (-1/2, 1/2]
            if (j == 0) {
                prev = ang;
            } else {
                while (ang < prev - 0.5) ang += 1.0;     // unwrap, curve winds once
                while (ang > prev + 0.5) ang -= 1.0;
                prev = ang;
            }
            entries_.push_back({ang, std::abs(rel), static_cast<double>(j) / m});
        }
        // positively oriented star-shaped curves only: unwrapped angles ascend
        double sweep = entries_.back().angle - entries_.front().angle;
        if (sweep < 0.5)
            throw std::runtime_error("StarView: curve not positively oriented about the center");
        base_ = entries_.front().angle;
    }

    /// radius of the curve in direction `dir` (fraction of a turn, any real)
    double radius_at(double dir) const { return lookup(dir).first; }

    /// curve parameter (mod 1) of the point in direction `dir`
    double param_at(double dir) const { return lookup(dir).second; }

private:
    struct Entry {
        double angle;   // unwrapped geometric angle, turns
        double radius;
        double param;   // curve parameter in [0,1)
    };

    // locate dir between consecutive unwrapped angles; angles increase by ~1/m
    std::pair<double, double> lookup(double dir) const {
        const int m = static_cast<int>(entries_.size());
        double d = dir - base_;
        d -= std::floor(d);          // within one turn above base_
        double target = base_ + d;
        // entries_ angles ascend from base_ to ~base_+1; binary search
        int lo = 0, hi = m;          // invariant: angle(lo) <= target < angle(hi) (cyclic)
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            if (entries_[static_cast<std::size_t>(mid)].angle <= target)
                lo = mid;
            else
                hi = mid;
        }
        const Entry& a = entries_[static_cast<std::size_t>(lo)];
        const Entry& b = entries_[static_cast<std::size_t>((lo + 1) % m)];
        double next_angle = (lo + 1 < m) ? b.angle : b.angle + 1.0;
        double span = next_angle - a.angle;
        double f = (span > 1e-15) ? (target - a.angle) / span : 0.0;
        double radius = a.radius * (1.0 - f) + b.radius * f;
        double pb = (lo + 1 < m) ? b.param : b.param + 1.0;
        double param = a.param * (1.0 - f) + pb * f;
        return {radius, param - std::floor(param)};
    }

    cpx center_{0.0, 0.0};
    std::vector<Entry> entries_;
    double base_ = 0.0;
};

} // namespace limitlab
