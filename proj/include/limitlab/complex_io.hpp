#pragma once

#include <charconv>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace limitlab {

using cpx = std::complex<double>;

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Complex literal grammar "x+yi": "2", "-0.5", "1+2i", "-1-0.25i", "2i", "-i".
/// Pure-imaginary and pure-real forms are both accepted; output is canonical
/// (no "+0i" tail, no "1i" coefficient shorthand lost).
inline std::string format_complex(const cpx& z) {
    double re = z.real(), im = z.imag();
    if (im == 0.0) return format_double(re);
    std::string s;
    if (re != 0.0) s += format_double(re);
    if (im == 1.0) s += s.empty() ? "i" : "+i";
    else if (im == -1.0) s += "-i";
    else {
        std::string t = format_double(im);
        if (!s.empty() && t[0] != '-') s += '+';
        s += t;
        s += 'i';
    }
    return s;
}

namespace detail {

inline bool parse_double_at(std::string_view s, std::size_t& pos, double& out) {
    const char* begin = s.data() + pos;
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{}) return false;
    pos += static_cast<std::size_t>(res.ptr - begin);
    return true;
}

} // namespace detail

inline cpx parse_complex(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty complex literal");

    double re = 0.0, im = 0.0;
    std::size_t pos = 0;
    auto term = [&](double& dst_re, double& dst_im) -> bool {
        if (pos >= s.size()) return false;
        // bare "i", "+i", "-i"
        double sign = 1.0;
        std::size_t save = pos;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = (s[pos] == '-') ? -1.0 : 1.0;
            if (pos + 1 < s.size() && (s[pos + 1] == 'i' || s[pos + 1] == 'I')) {
                pos += 2;
                dst_im += sign;
                return true;
            }
        } else if (s[pos] == 'i' || s[pos] == 'I') {
            ++pos;
            dst_im += 1.0;
            return true;
        }
        // from_chars accepts a leading '-' but not '+'
        if (s[pos] == '+') ++pos;
        double v;
        if (!detail::parse_double_at(s, pos, v)) { pos = save; return false; }
        if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'I')) {
            ++pos;
            dst_im += v;
        } else {
            dst_re += v;
        }
        return true;
    };

    if (!term(re, im)) throw std::invalid_argument("bad complex literal: " + std::string(text));
    if (pos < s.size()) {
        if (!term(re, im) || pos < s.size())
            throw std::invalid_argument("bad complex literal: " + std::string(text));
    }
    return {re, im};
}

/// Comma-separated complex list, e.g. a polynomial coefficient string.
inline std::vector<cpx> parse_complex_list(std::string_view text) {
    std::vector<cpx> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string_view item = (comma == std::string_view::npos)
                                    ? text.substr(start)
                                    : text.substr(start, comma - start);
        out.push_back(parse_complex(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string format_complex_list(const std::vector<cpx>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_complex(v[i]);
    }
    return s;
}

} // namespace limitlab
