#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matcrs {

using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

/// Parses "p/q" or "p" (decimal digits, optional sign). Throws on bad input
/// or zero denominator.
inline Rat parse_rat(std::string_view text) {
    auto is_int = [](std::string_view s) {
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        if (!is_int(text)) throw std::invalid_argument("bad rational: " + std::string(text));
        return Rat(Int(std::string(text)));
    }
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw std::invalid_argument("bad rational: " + std::string(text));
    Int d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    return Rat(Int(std::string(num)), d);
}

/// Canonical "p/q" form; integers render without the "/1".
inline std::string rat_to_string(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rat rat_pow(const Rat& base, unsigned exp) {
    Rat result = 1, b = base;
    while (exp > 0) {
        if (exp & 1u) result *= b;
        b *= b;
        exp >>= 1;
    }
    return result;
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

inline Int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    Int result = 1;
    for (unsigned i = 0; i < k; ++i) {
        result *= n - i;
        result /= i + 1;
    }
    return result;
}

/// A nonnegative rational extended with +infinity; the codomain of
/// competitive-ratio computations (ratios can be infinite when an element is
/// active with positive probability but never selectable).
struct ExtRat {
    bool infinite = false;
    Rat value = 0;  // meaningful only when finite

    static ExtRat inf() { return ExtRat{true, 0}; }
    static ExtRat of(Rat v) { return ExtRat{false, std::move(v)}; }

    bool is_finite() const { return !infinite; }

    friend bool operator==(const ExtRat& a, const ExtRat& b) {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.value == b.value;
    }
    friend bool operator<(const ExtRat& a, const ExtRat& b) {
        if (a.infinite) return false;
        if (b.infinite) return true;
        return a.value < b.value;
    }
    friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a == b || a < b; }
    friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
    friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }
};

inline std::string to_string(const ExtRat& r) {
    return r.infinite ? std::string("inf") : rat_to_string(r.value);
}

inline ExtRat parse_ext_rat(std::string_view text) {
    if (text == "inf") return ExtRat::inf();
    return ExtRat::of(parse_rat(text));
}

}  // namespace matcrs
