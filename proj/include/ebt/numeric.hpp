#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>

#include "ebt/errors.hpp"

namespace ebt {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int factorial(int n) {
    Int r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    Int r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

// Falling-factorial Pochhammer symbol (q)_n = q(q-1)...(q-n+1) for n >= 0,
// extended to negative n by (q)_{-n} = 1/((q+1)(q+2)...(q+n)).
// Satisfies (q)_{n+1} = (q)_n (q - n) for every integer n where defined.
inline Rat pochhammer(const Rat& q, long n) {
    if (n >= 0) {
        Rat r = 1;
        for (long i = 0; i < n; ++i) r *= (q - i);
        return r;
    }
    Rat r = 1;
    for (long i = 1; i <= -n; ++i) {
        Rat f = q + i;
        if (f == 0)
            throw PolePochhammer("(q)_n at q=" + q.str() + ", n=" + std::to_string(n));
        r *= f;
    }
    return 1 / r;
}

// Harmonic number c_n = 1 + 1/2 + ... + 1/n, c_0 = 0.
inline Rat harmonic(int n) {
    Rat r = 0;
    for (int i = 1; i <= n; ++i) r += Rat(1, i);
    return r;
}

// Exact integer n-th root: returns r with r^n == v if one exists.
inline std::optional<Int> exact_root(const Int& v, int n) {
    if (n <= 0) return std::nullopt;
    if (n == 1) return v;
    if (v == 0) return Int(0);
    bool neg = v < 0;
    if (neg && n % 2 == 0) return std::nullopt;
    Int a = neg ? Int(-v) : v;
    // Newton iteration on integers, then verify.
    Int x = Int(1) << static_cast<unsigned>((boost::multiprecision::msb(a) / n) + 1);
    while (true) {
        Int xn = boost::multiprecision::pow(x, static_cast<unsigned>(n - 1));
        Int next = ((n - 1) * x + a / xn) / n;
        if (next >= x) break;
        x = next;
    }
    if (boost::multiprecision::pow(x, static_cast<unsigned>(n)) == a)
        return neg ? Int(-x) : x;
    return std::nullopt;
}

// Exact rational n-th root.
inline std::optional<Rat> exact_root(const Rat& v, int n) {
    auto num = exact_root(Int(boost::multiprecision::numerator(v)), n);
    if (!num) return std::nullopt;
    auto den = exact_root(Int(boost::multiprecision::denominator(v)), n);
    if (!den) return std::nullopt;
    return Rat(*num, *den);
}

inline Rat rat_pow(const Rat& b, long e) {
    if (e == 0) return Rat(1);
    Rat r = 1, a = b;
    long n = e < 0 ? -e : e;
    for (; n; n >>= 1) {
        if (n & 1) r *= a;
        if (n > 1) a *= a;
    }
    return e < 0 ? Rat(1) / r : r;
}

} // namespace ebt
