#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "ebt/numeric.hpp"

namespace ebt {

// Dense polynomial over Rat, coefficient of x^i at index i, high zeros trimmed.
namespace polydetail {

using RPoly = std::vector<Rat>;

inline void trim(RPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

// Exact division q = a / b for monic-leading b that divides a exactly.
inline RPoly divide_exact(RPoly a, const RPoly& b) {
    RPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
    while (a.size() >= b.size() && !a.empty()) {
        Rat c = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        trim(a);
    }
    return q;
}

inline RPoly cyclotomic(int n) {
    // x^n - 1 divided by all lower cyclotomic factors.
    RPoly p(n + 1, Rat(0));
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d)
        if (n % d == 0) p = divide_exact(std::move(p), cyclotomic(d));
    return p;
}

} // namespace polydetail

// Element of Q(w_N): coefficient vector of length deg(Phi_N) in the power
// basis 1, w, ..., w^{deg-1}.
using Cyc = std::vector<Rat>;

// The ring Q(w_N) with precomputed reduction tables. Values of type Cyc are
// passive data; all arithmetic goes through a CycRing.
class CycRing {
public:
    explicit CycRing(int N) : n_(N), phi_(polydetail::cyclotomic(N)) {
        deg_ = static_cast<int>(phi_.size()) - 1;
        // x^t mod Phi_N for all t we can meet: products reach 2*deg-2,
        // root powers reach N-1.
        int tmax = std::max(2 * deg_, n_);
        pow_.assign(tmax + 1, Cyc(deg_, Rat(0)));
        Cyc cur(deg_, Rat(0));
        cur[0] = 1;
        pow_[0] = cur;
        for (int t = 1; t <= tmax; ++t) {
            // multiply by x, reduce by Phi_N.
            Rat carry = cur[deg_ - 1];
            for (int i = deg_ - 1; i > 0; --i) cur[i] = cur[i - 1];
            cur[0] = 0;
            if (carry != 0)
                for (int i = 0; i < deg_; ++i) cur[i] -= carry * phi_[i];
            pow_[t] = cur;
        }
    }

    int modulus() const { return n_; }
    int degree() const { return deg_; }

    Cyc zero() const { return Cyc(deg_, Rat(0)); }

    Cyc from_rat(const Rat& r) const {
        Cyc c = zero();
        c[0] = r;
        return c;
    }

    Cyc one() const { return from_rat(1); }

    // w^t for any integer t.
    Cyc root_pow(long t) const {
        long r = t % n_;
        if (r < 0) r += n_;
        return pow_[static_cast<std::size_t>(r)];
    }

    static bool is_zero(const Cyc& a) {
        for (const auto& c : a)
            if (c != 0) return false;
        return true;
    }

    Cyc add(const Cyc& a, const Cyc& b) const {
        Cyc r = a;
        for (int i = 0; i < deg_; ++i) r[i] += b[i];
        return r;
    }

    Cyc sub(const Cyc& a, const Cyc& b) const {
        Cyc r = a;
        for (int i = 0; i < deg_; ++i) r[i] -= b[i];
        return r;
    }

    Cyc neg(const Cyc& a) const {
        Cyc r = a;
        for (auto& c : r) c = -c;
        return r;
    }

    Cyc scale(const Cyc& a, const Rat& s) const {
        Cyc r = a;
        for (auto& c : r) c *= s;
        return r;
    }

    Cyc mul(const Cyc& a, const Cyc& b) const {
        std::vector<Rat> conv(2 * deg_ - 1, Rat(0));
        for (int i = 0; i < deg_; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; j < deg_; ++j) {
                if (b[j] == 0) continue;
                conv[i + j] += a[i] * b[j];
            }
        }
        Cyc r = zero();
        for (int e = 0; e < static_cast<int>(conv.size()); ++e) {
            if (conv[e] == 0) continue;
            const Cyc& xe = pow_[e];
            for (int i = 0; i < deg_; ++i) r[i] += conv[e] * xe[i];
        }
        return r;
    }

    // Inverse via extended Euclid in Q[x] against Phi_N.
    Cyc inv(const Cyc& a) const {
        if (is_zero(a)) throw Error("division by zero in Q(w)");
        using polydetail::RPoly;
        RPoly r0(phi_.begin(), phi_.end());
        RPoly r1(a.begin(), a.end());
        polydetail::trim(r1);
        RPoly s0{}, s1{Rat(1)}; // coefficients of `a` in the Bezout combination
        while (!r1.empty()) {
            // r0 = q*r1 + r2
            RPoly q;
            RPoly r2 = r0;
            if (r2.size() >= r1.size()) {
                q.assign(r2.size() - r1.size() + 1, Rat(0));
                while (r2.size() >= r1.size() && !r2.empty()) {
                    Rat c = r2.back() / r1.back();
                    std::size_t shift = r2.size() - r1.size();
                    q[shift] += c;
                    for (std::size_t i = 0; i < r1.size(); ++i) r2[shift + i] -= c * r1[i];
                    polydetail::trim(r2);
                }
            }
            // s2 = s0 - q*s1
            RPoly qs(q.size() + s1.size(), Rat(0));
            for (std::size_t i = 0; i < q.size(); ++i) {
                if (q[i] == 0) continue;
                for (std::size_t j = 0; j < s1.size(); ++j) qs[i + j] += q[i] * s1[j];
            }
            polydetail::trim(qs);
            RPoly s2 = s0;
            if (s2.size() < qs.size()) s2.resize(qs.size(), Rat(0));
            for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
            polydetail::trim(s2);
            r0 = std::move(r1);
            r1 = std::move(r2);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        // r0 is the gcd, a nonzero constant; s0 * a == r0 (mod Phi).
        if (r0.size() != 1) throw Error("inverse failed: argument not a unit in Q(w)");
        Cyc res = zero();
        for (std::size_t i = 0; i < s0.size() && i < static_cast<std::size_t>(deg_); ++i)
            res[i] = s0[i] / r0[0];
        // s0 may have degree >= deg_ only transiently; reduce just in case.
        for (std::size_t i = static_cast<std::size_t>(deg_); i < s0.size(); ++i) {
            if (s0[i] == 0) continue;
            const Cyc& xe = pow_[i];
            for (int j = 0; j < deg_; ++j) res[j] += (s0[i] / r0[0]) * xe[j];
        }
        return res;
    }

    std::string to_string(const Cyc& a) const {
        if (is_zero(a)) return "0";
        std::string out;
        bool first = true;
        for (int i = 0; i < deg_; ++i) {
            if (a[i] == 0) continue;
            std::string term;
            Rat c = a[i];
            if (i == 0) {
                term = c.str();
            } else {
                std::string base = (i == 1) ? "w" : "w^" + std::to_string(i);
                if (c == 1)
                    term = base;
                else if (c == -1)
                    term = "-" + base;
                else
                    term = c.str() + "*" + base;
            }
            if (first) {
                out = term;
                first = false;
            } else if (!term.empty() && term[0] == '-') {
                out += " - " + term.substr(1);
            } else {
                out += " + " + term;
            }
        }
        return out;
    }

private:
    int n_;
    polydetail::RPoly phi_;
    int deg_ = 0;
    std::vector<Cyc> pow_;
};

} // namespace ebt
