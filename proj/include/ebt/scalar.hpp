#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "ebt/context.hpp"

namespace ebt {

// Laurent monomial in the registered symbols: id -> exponent, zeros absent.
using Mono = std::map<int, int>;

// Multivariate Laurent polynomial over Q(w_N).
using Poly = std::map<Mono, Cyc>;

inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r = a;
    for (const auto& [id, e] : b) {
        int v = (r[id] += e);
        if (v == 0) r.erase(id);
    }
    return r;
}

inline Mono mono_div(const Mono& a, const Mono& b) {
    Mono r = a;
    for (const auto& [id, e] : b) {
        int v = (r[id] -= e);
        if (v == 0) r.erase(id);
    }
    return r;
}

inline Mono mono_pow(const Mono& a, int p) {
    Mono r;
    if (p != 0)
        for (const auto& [id, e] : a) r[id] = e * p;
    return r;
}

namespace polyops {

inline void add_term(const CycRing& ring, Poly& p, const Mono& mo, const Cyc& c) {
    if (CycRing::is_zero(c)) return;
    auto [it, fresh] = p.emplace(mo, c);
    if (!fresh) {
        it->second = ring.add(it->second, c);
        if (CycRing::is_zero(it->second)) p.erase(it);
    }
}

inline Poly add(const CycRing& ring, const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [mo, c] : b) add_term(ring, r, mo, c);
    return r;
}

inline Poly neg(const CycRing& ring, const Poly& a) {
    Poly r = a;
    for (auto& [mo, c] : r) c = ring.neg(c);
    return r;
}

inline Poly mul(const CycRing& ring, const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) add_term(ring, r, mono_mul(ma, mb), ring.mul(ca, cb));
    return r;
}

inline Poly scale(const CycRing& ring, const Poly& a, const Cyc& c) {
    Poly r;
    for (const auto& [mo, co] : a) add_term(ring, r, mo, ring.mul(co, c));
    return r;
}

} // namespace polyops

// Element of the constant field: a ratio of Laurent polynomials in the
// symbols over Q(w_N). Normalization is light (common monomial content,
// unit leading denominator coefficient, monomial denominators cancelled);
// equality is decided by cross-multiplication, which is exact.
class Scalar {
public:
    Scalar() = default;

    static Scalar zero(const Context* ctx) {
        Scalar s;
        s.ctx_ = ctx;
        s.den_[{}] = ctx->ring().one();
        return s;
    }

    static Scalar from_cyc(const Context* ctx, const Cyc& c) {
        Scalar s = zero(ctx);
        if (!CycRing::is_zero(c)) s.num_[{}] = c;
        return s;
    }

    static Scalar from_rat(const Context* ctx, const Rat& r) {
        return from_cyc(ctx, ctx->ring().from_rat(r));
    }

    static Scalar one(const Context* ctx) { return from_rat(ctx, 1); }

    static Scalar sym(const Context* ctx, int id, int exp = 1) {
        Scalar s = zero(ctx);
        Mono mo;
        if (exp != 0) mo[id] = exp;
        s.num_[mo] = ctx->ring().one();
        return s;
    }

    static Scalar monomial(const Context* ctx, const Mono& mo, const Cyc& c) {
        Scalar s = zero(ctx);
        if (!CycRing::is_zero(c)) s.num_[mo] = c;
        return s;
    }

    const Context* ctx() const { return ctx_; }
    bool is_zero() const { return num_.empty(); }

    bool is_one() const {
        return num_.size() == 1 && num_ == den_;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        const CycRing& ring = a.ctx_->ring();
        Scalar r;
        r.ctx_ = a.ctx_;
        if (a.den_ == b.den_) {
            r.num_ = polyops::add(ring, a.num_, b.num_);
            r.den_ = a.den_;
        } else {
            r.num_ = polyops::add(ring, polyops::mul(ring, a.num_, b.den_),
                                  polyops::mul(ring, b.num_, a.den_));
            r.den_ = polyops::mul(ring, a.den_, b.den_);
        }
        if (r.num_.empty()) {
            r.den_.clear();
            r.den_[{}] = ring.one();
        } else {
            r.normalize();
        }
        return r;
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

    Scalar operator-() const {
        Scalar r = *this;
        r.num_ = polyops::neg(ctx_->ring(), r.num_);
        return r;
    }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        const CycRing& ring = a.ctx_->ring();
        Scalar r;
        r.ctx_ = a.ctx_;
        r.num_ = polyops::mul(ring, a.num_, b.num_);
        if (r.num_.empty()) {
            r.den_[{}] = ring.one();
            return r;
        }
        r.den_ = polyops::mul(ring, a.den_, b.den_);
        r.normalize();
        return r;
    }

    Scalar inv() const {
        if (is_zero()) throw Error("division by zero scalar");
        Scalar r;
        r.ctx_ = ctx_;
        r.num_ = den_;
        r.den_ = num_;
        r.normalize();
        return r;
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    // Multiply by a rational without building a second fraction.
    Scalar scale_by(const Rat& q) const {
        if (q == 0 || is_zero()) return zero(ctx_);
        Scalar r = *this;
        Cyc c = ctx_->ring().from_rat(q);
        for (auto& [mo, co] : r.num_) co = ctx_->ring().mul(co, c);
        return r;
    }

    Scalar pow_int(long e) const {
        if (e < 0) return inv().pow_int(-e);
        Scalar r = one(ctx_);
        Scalar base = *this;
        for (long n = e; n; n >>= 1) {
            if (n & 1) r = r * base;
            if (n > 1) base = base * base;
        }
        return r;
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.num_.empty() || b.num_.empty()) return a.num_.empty() && b.num_.empty();
        const CycRing& ring = a.ctx_->ring();
        if (a.den_ == b.den_) return a.num_ == b.num_;
        return polyops::mul(ring, a.num_, b.den_) == polyops::mul(ring, b.num_, a.den_);
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Single-term numerator over denominator 1, e.g. eligible for exact
    // roots and logarithms.
    std::optional<std::pair<Mono, Cyc>> as_monomial() const {
        if (num_.size() != 1) return std::nullopt;
        if (!(den_.size() == 1 && den_.begin()->first.empty())) return std::nullopt;
        const Cyc& dc = den_.begin()->second;
        Cyc c = num_.begin()->second;
        if (!(dc == ctx_->ring().one())) c = ctx_->ring().mul(c, ctx_->ring().inv(dc));
        return std::make_pair(num_.begin()->first, c);
    }

    std::optional<Rat> as_rat() const {
        auto mo = as_monomial();
        if (is_zero()) return Rat(0);
        if (!mo || !mo->first.empty()) return std::nullopt;
        for (std::size_t i = 1; i < mo->second.size(); ++i)
            if (mo->second[i] != 0) return std::nullopt;
        return mo->second[0];
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    std::string str() const {
        if (is_zero()) return "0";
        std::string n = poly_str(num_);
        if (den_.size() == 1 && den_.begin()->first.empty() &&
            den_.begin()->second == ctx_->ring().one())
            return n;
        std::string d = poly_str(den_);
        return "(" + n + ")/(" + d + ")";
    }

private:
    void normalize() {
        if (num_.empty()) {
            den_.clear();
            den_[{}] = ctx_->ring().one();
            return;
        }
        const CycRing& ring = ctx_->ring();
        // common monomial content of num and den
        Mono content;
        bool first = true;
        auto meet = [&](const Poly& p) {
            for (const auto& [mo, c] : p) {
                (void)c;
                if (first) {
                    content = mo;
                    first = false;
                    continue;
                }
                for (auto it = content.begin(); it != content.end();) {
                    auto jt = mo.find(it->first);
                    int other = jt == mo.end() ? 0 : jt->second;
                    int lo = std::min(it->second, other);
                    if (lo == 0)
                        it = content.erase(it);
                    else {
                        it->second = lo;
                        ++it;
                    }
                }
                // symbols missing from `content` but present with negative
                // exponent here lower the content below zero
                for (const auto& [id, e] : mo)
                    if (e < 0 && !content.count(id)) content[id] = e;
            }
        };
        meet(num_);
        meet(den_);
        if (!content.empty()) {
            Poly nn, nd;
            for (const auto& [mo, c] : num_) nn[mono_div(mo, content)] = c;
            for (const auto& [mo, c] : den_) nd[mono_div(mo, content)] = c;
            num_ = std::move(nn);
            den_ = std::move(nd);
        }
        // unit leading coefficient in the denominator
        Cyc lead = den_.begin()->second;
        if (!(lead == ring.one())) {
            Cyc li = ring.inv(lead);
            for (auto& [mo, c] : num_) c = ring.mul(c, li);
            for (auto& [mo, c] : den_) c = ring.mul(c, li);
        }
        // monomial denominator cancels into the (Laurent) numerator
        if (den_.size() == 1) {
            Mono dm = den_.begin()->first;
            if (!dm.empty()) {
                Poly nn;
                for (const auto& [mo, c] : num_) nn[mono_div(mo, dm)] = c;
                num_ = std::move(nn);
                den_.clear();
                den_[{}] = ring.one();
            }
        }
    }

    std::string poly_str(const Poly& p) const {
        std::string out;
        bool first = true;
        for (const auto& [mo, c] : p) {
            std::string term;
            std::string cs = ctx_->ring().to_string(c);
            bool needs_paren = cs.find(' ') != std::string::npos;
            std::string ms;
            for (const auto& [id, e] : mo) {
                if (!ms.empty()) ms += "*";
                ms += ctx_->symbol_name(id);
                if (e != 1) ms += "^" + std::to_string(e);
            }
            if (ms.empty())
                term = needs_paren ? "(" + cs + ")" : cs;
            else if (cs == "1")
                term = ms;
            else if (cs == "-1")
                term = "-" + ms;
            else
                term = (needs_paren ? "(" + cs + ")" : cs) + "*" + ms;
            if (first) {
                out = term;
                first = false;
            } else if (!term.empty() && term[0] == '-') {
                out += " - " + term.substr(1);
            } else {
                out += " + " + term;
            }
        }
        return out.empty() ? "0" : out;
    }

    const Context* ctx_ = nullptr;
    Poly num_;
    Poly den_;
};

} // namespace ebt
