#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "limitlab/complex_io.hpp"

namespace limitlab {

/// Complex polynomial, coefficients lowest degree first. The substrate for
/// every dynamical construction here; degree >= 2 is required by the
/// dynamical operations and enforced at their entry points, not on the type.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<cpx> coeffs) : c_(std::move(coeffs)) {
        while (c_.size() > 1 && c_.back() == cpx(0.0, 0.0)) c_.pop_back();
        if (c_.empty()) c_.push_back(cpx(0.0, 0.0));
    }

    /// parse "a0,a1,...,ad" with complex literals "x+yi"
    static Polynomial parse(std::string_view text) {
        return Polynomial(parse_complex_list(text));
    }

    /// z^d + c shorthand used all over the tests
    static Polynomial power_plus(int d, cpx c) {
        std::vector<cpx> v(static_cast<std::size_t>(d) + 1, cpx(0.0, 0.0));
        v[0] = c;
        v[static_cast<std::size_t>(d)] = 1.0;
        return Polynomial(std::move(v));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<cpx>& coefficients() const { return c_; }
    cpx leading() const { return c_.back(); }

    cpx operator()(cpx z) const { return eval(z); }

    cpx eval(cpx z) const {
        cpx acc = c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * z + c_[i];
        return acc;
    }

    /// value and derivative in one Horner pass
    void eval2(cpx z, cpx& value, cpx& deriv) const {
        cpx p = c_.back(), dp = 0.0;
        for (std::size_t i = c_.size() - 1; i-- > 0;) {
            dp = dp * z + p;
            p = p * z + c_[i];
        }
        value = p;
        deriv = dp;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial({cpx(0.0, 0.0)});
        std::vector<cpx> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
        return Polynomial(std::move(d));
    }

    /// n-fold composition applied to a point
    cpx iterate(cpx z, int n) const {
        for (int i = 0; i < n; ++i) z = eval(z);
        return z;
    }

    /// max |a_i| over all coefficients
    double coefficient_bound() const {
        double m = 0.0;
        for (const cpx& a : c_) m = std::max(m, std::abs(a));
        return m;
    }

    /// radius beyond which escape to infinity is certain (and then some);
    /// also the default classification radius
    double escape_radius() const {
        double lead = std::abs(c_.back());
        double rest = 0.0;
        for (std::size_t i = 0; i + 1 < c_.size(); ++i) rest += std::abs(c_[i]);
        double r = 1.0 + rest / lead;
        return std::max(2.0, 2.0 * r);
    }

    std::string str() const { return format_complex_list(c_); }

    void require_dynamical(const char* who) const {
        if (degree() < 2)
            throw std::invalid_argument(std::string(who) + ": polynomial degree must be >= 2");
    }

private:
    std::vector<cpx> c_;
};

} // namespace limitlab
