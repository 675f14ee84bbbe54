#pragma once

#include "ebt/coeff.hpp"

namespace ebt {

// Exact Laurent polynomial in a formal variable zeta with Coeff values.
// Downstream code truncates explicitly by degree where series are involved;
// this type itself is a plain finite map.
class ZC {
public:
    ZC() = default;
    explicit ZC(const Context* ctx) : ctx_(ctx) {}

    static ZC zero(const Context* ctx) { return ZC(ctx); }

    static ZC one(const Context* ctx) {
        ZC r(ctx);
        r.c_[0] = Coeff::one(ctx);
        return r;
    }

    static ZC monomial(const Context* ctx, int deg, const Coeff& v) {
        ZC r(ctx);
        if (!v.is_zero()) r.c_[deg] = v;
        return r;
    }

    const Context* ctx() const { return ctx_; }
    const std::map<int, Coeff>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    Coeff at(int d) const {
        auto it = c_.find(d);
        return it == c_.end() ? Coeff::zero(ctx_) : it->second;
    }

    void add_at(int d, const Coeff& v) {
        if (v.is_zero()) return;
        auto [it, fresh] = c_.emplace(d, v);
        if (!fresh) {
            it->second = it->second + v;
            if (it->second.is_zero()) c_.erase(it);
        }
    }

    friend ZC operator+(const ZC& u, const ZC& v) {
        ZC r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d, a);
        return r;
    }

    friend ZC operator-(const ZC& u, const ZC& v) {
        ZC r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d, -a);
        return r;
    }

    ZC operator-() const {
        ZC r = *this;
        for (auto& [d, a] : r.c_) a = -a;
        return r;
    }

    friend ZC operator*(const ZC& u, const ZC& v) {
        ZC r(u.ctx_);
        for (const auto& [s, a] : u.c_)
            for (const auto& [t, b] : v.c_) r.add_at(s + t, a * b);
        return r;
    }

    // Product truncated to degrees in [lo, hi] (degree filter, not a
    // completeness claim; callers pick lo/hi so the kept range is exact).
    ZC mul_trunc(const ZC& v, int lo, int hi) const {
        ZC r(ctx_);
        for (const auto& [s, a] : c_)
            for (const auto& [t, b] : v.c_) {
                int d = s + t;
                if (d < lo || d > hi) continue;
                r.add_at(d, a * b);
            }
        return r;
    }

    ZC truncate(int lo, int hi) const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_)
            if (lo <= d && d <= hi) r.c_[d] = a;
        return r;
    }

    ZC scale(const Scalar& s) const {
        ZC r(ctx_);
        if (s.is_zero()) return r;
        for (const auto& [d, a] : c_) r.c_[d] = a.scale(s);
        return r;
    }

    ZC scale_rat(const Rat& q) const {
        ZC r(ctx_);
        if (q == 0) return r;
        for (const auto& [d, a] : c_) r.c_[d] = a.scale_rat(q);
        return r;
    }

    ZC mul_coeff(const Coeff& f) const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_) {
            Coeff v = a * f;
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    ZC mul_zeta_pow(int j) const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_) r.c_[d + j] = a;
        return r;
    }

    // zeta -> q zeta
    ZC scale_zeta(const Scalar& q) const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_) r.c_[d] = a.scale(q.pow_int(d));
        return r;
    }

    ZC zeta_inverse() const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_) r.c_[-d] = a;
        return r;
    }

    template <class F>
    ZC map(F&& f) const {
        ZC r(ctx_);
        for (const auto& [d, a] : c_) {
            Coeff v = f(a);
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    // exp of a series supported in degrees [lo_keep.., 0]: the zeta^0 part
    // must be a quasi-polynomial logarithm (see Coeff::exp_quasi); strictly
    // negative degrees are nilpotent once truncated below lo.
    ZC exp_lower(int lo) const {
        for (const auto& [d, a] : c_) {
            (void)a;
            if (d > 0) throw Error("exp_lower: positive zeta powers present");
        }
        Coeff head = Coeff::one(ctx_);
        auto it0 = c_.find(0);
        if (it0 != c_.end()) head = it0->second.exp_quasi();
        ZC acc = ZC::one(ctx_);
        ZC nil(ctx_);
        for (const auto& [d, a] : c_)
            if (d < 0 && d >= lo) nil.c_[d] = a;
        ZC pw = ZC::one(ctx_);
        Rat fact(1);
        for (int j = 1; !pw.is_zero() && j <= -lo; ++j) {
            pw = pw.mul_trunc(nil, lo, 0);
            fact *= j;
            acc = acc + pw.scale_rat(Rat(1) / fact);
        }
        return acc.mul_coeff(head);
    }

    // exp of a series with strictly positive degrees and all terms carrying
    // time factors; truncated to degrees <= hi.
    ZC exp_upper(int hi) const {
        for (const auto& [d, a] : c_) {
            (void)a;
            if (d <= 0) throw Error("exp_upper: nonpositive zeta powers present");
            if (!a.keep_time_free().is_zero())
                throw Error("exp_upper: time-free term present");
        }
        ZC acc = ZC::one(ctx_);
        ZC pw = ZC::one(ctx_);
        Rat fact(1);
        for (int j = 1; !pw.is_zero() && j <= hi; ++j) {
            pw = pw.mul_trunc(*this, 0, hi);
            fact *= j;
            acc = acc + pw.scale_rat(Rat(1) / fact);
        }
        return acc;
    }

    // log of a series 1 + N with N supported in [lo, -1].
    ZC log_lower(int lo) const {
        auto it0 = c_.find(0);
        if (it0 == c_.end()) throw NonUnitLeading("log: no zeta^0 term");
        Coeff u = it0->second;
        Coeff ui = u.invert_unit();
        ZC n(ctx_);
        for (const auto& [d, a] : c_) {
            if (d > 0) throw Error("log_lower: positive zeta powers present");
            if (d < 0 && d >= lo) n.c_[d] = a * ui;
        }
        ZC acc = ZC::monomial(ctx_, 0, u.log_unit());
        ZC pw = ZC::one(ctx_);
        Rat sign(1);
        for (int j = 1; !pw.is_zero() && j <= -lo; ++j) {
            pw = pw.mul_trunc(n, lo, 0);
            acc = acc + pw.scale_rat(sign / j);
            sign = -sign;
        }
        return acc;
    }

    friend bool operator==(const ZC& u, const ZC& v) { return (u - v).is_zero(); }

    std::string str() const {
        std::string out;
        for (const auto& [d, a] : c_) {
            if (!out.empty()) out += "  +  ";
            out += "[" + a.str() + "] z^" + std::to_string(d);
        }
        return out.empty() ? "0" : out;
    }

private:
    const Context* ctx_ = nullptr;
    std::map<int, Coeff> c_;
};

// Exact Laurent polynomial in two formal variables (zeta, xi).
class ZZ {
public:
    ZZ() = default;
    explicit ZZ(const Context* ctx) : ctx_(ctx) {}

    static ZZ zero(const Context* ctx) { return ZZ(ctx); }

    const Context* ctx() const { return ctx_; }
    const std::map<std::pair<int, int>, Coeff>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    Coeff at(int d1, int d2) const {
        auto it = c_.find({d1, d2});
        return it == c_.end() ? Coeff::zero(ctx_) : it->second;
    }

    void add_at(int d1, int d2, const Coeff& v) {
        if (v.is_zero()) return;
        auto [it, fresh] = c_.emplace(std::pair{d1, d2}, v);
        if (!fresh) {
            it->second = it->second + v;
            if (it->second.is_zero()) c_.erase(it);
        }
    }

    friend ZZ operator+(const ZZ& u, const ZZ& v) {
        ZZ r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d.first, d.second, a);
        return r;
    }

    friend ZZ operator-(const ZZ& u, const ZZ& v) {
        ZZ r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d.first, d.second, -a);
        return r;
    }

    ZZ mul_trunc(const ZZ& v, int lo1, int lo2) const {
        ZZ r(ctx_);
        for (const auto& [d, a] : c_)
            for (const auto& [e, b] : v.c_) {
                int d1 = d.first + e.first, d2 = d.second + e.second;
                if (d1 < lo1 || d2 < lo2) continue;
                r.add_at(d1, d2, a * b);
            }
        return r;
    }

    ZZ truncate(int lo1, int lo2) const {
        ZZ r(ctx_);
        for (const auto& [d, a] : c_)
            if (d.first >= lo1 && d.second >= lo2) r.c_[d] = a;
        return r;
    }

    static ZZ one(const Context* ctx) {
        ZZ r(ctx);
        r.c_[{0, 0}] = Coeff::one(ctx);
        return r;
    }

    ZZ scale_rat(const Rat& q) const {
        ZZ r(ctx_);
        for (const auto& [d, a] : c_) {
            Coeff v = a.scale_rat(q);
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    // exp of a series supported in degrees <= (0,0); the (0,0) part must be
    // a quasi-polynomial logarithm (see Coeff::exp_quasi), everything else
    // is nilpotent once truncated below (lo1, lo2).
    ZZ exp_lower(int lo1, int lo2) const {
        Coeff head = Coeff::one(ctx_);
        ZZ nil(ctx_);
        for (const auto& [d, a] : c_) {
            if (d.first > 0 || d.second > 0)
                throw Error("exp_lower: positive powers present");
            if (d.first == 0 && d.second == 0)
                head = a.exp_quasi();
            else if (d.first >= lo1 && d.second >= lo2)
                nil.c_[d] = a;
        }
        ZZ acc = one(ctx_);
        ZZ pw = one(ctx_);
        Rat fact(1);
        for (int j = 1; !pw.is_zero() && j <= -lo1 - lo2; ++j) {
            pw = pw.mul_trunc(nil, lo1, lo2);
            fact *= j;
            acc = acc + pw.scale_rat(Rat(1) / fact);
        }
        ZZ r(ctx_);
        for (const auto& [d, a] : acc.c_) {
            Coeff v = a * head;
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    // swap the two variables
    ZZ transpose() const {
        ZZ r(ctx_);
        for (const auto& [d, a] : c_) r.c_[{d.second, d.first}] = a;
        return r;
    }

    static ZZ lift1(const ZC& a) { // zeta-series into the first slot
        ZZ r(a.ctx());
        for (const auto& [d, v] : a.coeffs()) r.c_[{d, 0}] = v;
        return r;
    }

    static ZZ lift2(const ZC& a) {
        ZZ r(a.ctx());
        for (const auto& [d, v] : a.coeffs()) r.c_[{0, d}] = v;
        return r;
    }

    friend bool operator==(const ZZ& u, const ZZ& v) { return (u - v).is_zero(); }

private:
    const Context* ctx_ = nullptr;
    std::map<std::pair<int, int>, Coeff> c_;
};

} // namespace ebt
