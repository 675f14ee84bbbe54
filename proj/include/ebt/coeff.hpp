#pragma once

#include <functional>
#include <map>

#include "ebt/scalar.hpp"

namespace ebt {

// Time monomial: time id -> positive exponent.
using TMono = std::map<int, int>;

// Term shape of a coefficient: scalar * x^a * eps^b * prod_g g^(e_g x/eps) * q^t.
// `a` is a nonnegative x-degree, `b` an integer eps-degree, `e` the exponent
// vector of the exponential generators, `t` a time monomial.
struct CKey {
    int a = 0;
    int b = 0;
    Mono e;
    TMono t;
    friend bool operator<(const CKey& u, const CKey& v) {
        if (u.a != v.a) return u.a < v.a;
        if (u.b != v.b) return u.b < v.b;
        if (u.e != v.e) return u.e < v.e;
        return u.t < v.t;
    }
    friend bool operator==(const CKey& u, const CKey& v) {
        return u.a == v.a && u.b == v.b && u.e == v.e && u.t == v.t;
    }
};

// Quasi-polynomial coefficient: finite sum of CKey terms. Exact in x, eps,
// the exponential generators and the (truncated) times. Time monomials above
// the per-copy degree caps are dropped silently; x-cap and eps-window
// violations raise WindowOverflow.
class Coeff {
public:
    Coeff() = default;
    explicit Coeff(const Context* ctx) : ctx_(ctx) {}

    static Coeff zero(const Context* ctx) { return Coeff(ctx); }

    static Coeff one(const Context* ctx) {
        Coeff c(ctx);
        c.add_term({}, Scalar::one(ctx));
        return c;
    }

    static Coeff from_scalar(const Context* ctx, const Scalar& s) {
        Coeff c(ctx);
        c.add_term({}, s);
        return c;
    }

    static Coeff from_rat(const Context* ctx, const Rat& r) {
        return from_scalar(ctx, Scalar::from_rat(ctx, r));
    }

    static Coeff x_pow(const Context* ctx, int a, const Scalar& s) {
        Coeff c(ctx);
        CKey k;
        k.a = a;
        c.add_term(k, s);
        return c;
    }

    static Coeff eps_pow(const Context* ctx, int b, const Scalar& s) {
        Coeff c(ctx);
        CKey k;
        k.b = b;
        c.add_term(k, s);
        return c;
    }

    // prod_g g^(e_g * x/eps)
    static Coeff exp_gen(const Context* ctx, const Mono& e) {
        Coeff c(ctx);
        CKey k;
        k.e = e;
        c.add_term(k, Scalar::one(ctx));
        return c;
    }

    static Coeff time(const Context* ctx, int time_id, const Scalar& s) {
        Coeff c(ctx);
        CKey k;
        k.t[time_id] = 1;
        c.add_term(k, s);
        return c;
    }

    static Coeff term(const Context* ctx, const CKey& key, const Scalar& s) {
        Coeff c(ctx);
        c.add_term(key, s);
        return c;
    }

    const Context* ctx() const { return ctx_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<CKey, Scalar>& terms() const { return terms_; }

    int time_degree(const TMono& t, int copy) const {
        int d = 0;
        for (const auto& [id, p] : t)
            if (ctx_->time_key(id).copy == copy) d += p;
        return d;
    }

    void add_term(const CKey& key, const Scalar& s) {
        if (s.is_zero()) return;
        if (key.a < 0) throw Error("negative x-degree");
        if (key.a > ctx_->par.x_cap)
            throw WindowOverflow("x-degree " + std::to_string(key.a));
        if (key.b < ctx_->par.eps_lo || key.b > ctx_->par.eps_hi)
            throw WindowOverflow("eps-degree " + std::to_string(key.b));
        for (int c : {0, 1})
            if (time_degree(key.t, c) > ctx_->cap_copy[c]) return; // truncated
        auto [it, fresh] = terms_.emplace(key, s);
        if (!fresh) {
            it->second = it->second + s;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend Coeff operator+(const Coeff& u, const Coeff& v) {
        Coeff r = u;
        for (const auto& [k, s] : v.terms_) r.add_term(k, s);
        return r;
    }

    friend Coeff operator-(const Coeff& u, const Coeff& v) {
        Coeff r = u;
        for (const auto& [k, s] : v.terms_) r.add_term(k, -s);
        return r;
    }

    Coeff operator-() const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) r.terms_[k] = -s;
        return r;
    }

    friend Coeff operator*(const Coeff& u, const Coeff& v) {
        Coeff r(u.ctx_);
        for (const auto& [ku, su] : u.terms_)
            for (const auto& [kv, sv] : v.terms_) {
                CKey k;
                k.a = ku.a + kv.a;
                k.b = ku.b + kv.b;
                k.e = mono_mul(ku.e, kv.e);
                k.t = [&] {
                    TMono t = ku.t;
                    for (const auto& [id, p] : kv.t) t[id] += p;
                    return t;
                }();
                r.add_term(k, su * sv);
            }
        return r;
    }

    Coeff scale(const Scalar& s) const {
        Coeff r(ctx_);
        if (s.is_zero()) return r;
        for (const auto& [k, c] : terms_) {
            Scalar v = c * s;
            if (!v.is_zero()) r.terms_[k] = v;
        }
        return r;
    }

    Coeff scale_rat(const Rat& q) const { return scale(Scalar::from_rat(ctx_, q)); }

    // Multiply by eps^db.
    Coeff mul_eps(int db) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            CKey nk = k;
            nk.b += db;
            r.add_term(nk, s);
        }
        return r;
    }

    // x -> x + j*eps. Binomial on the x-powers; each generator g^(e_g x/eps)
    // picks up the constant factor g^(e_g j).
    Coeff shift_x(long j) const {
        if (j == 0) return *this;
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            Scalar base = s;
            if (!k.e.empty())
                base = base * Scalar::monomial(ctx_, mono_pow(k.e, static_cast<int>(j)),
                                               ctx_->ring().one());
            Rat jr(j);
            for (int i = k.a; i >= 0; --i) {
                CKey nk = k;
                nk.a = i;
                nk.b = k.b + (k.a - i);
                Rat f = Rat(binomial(k.a, i)) * rat_pow(jr, k.a - i);
                r.add_term(nk, base.scale_by(f));
            }
        }
        return r;
    }

    // D = eps * d/dx. Raises the eps-degree on polynomial parts; the
    // exponential generators contribute their logarithms.
    Coeff eps_dx() const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            if (k.a > 0) {
                CKey nk = k;
                nk.a = k.a - 1;
                nk.b = k.b + 1;
                r.add_term(nk, s.scale_by(Rat(k.a)));
            }
            for (const auto& [g, eg] : k.e) {
                int lg = ctx_->log_sym(g);
                if (lg < 0) throw Error("exponential generator without logarithm: " +
                                        ctx_->symbol_name(g));
                r.add_term(k, s.scale_by(Rat(eg)) * Scalar::sym(ctx_, lg));
            }
        }
        return r;
    }

    Coeff dx() const { return eps_dx().mul_eps(-1); }

    Coeff diff_time(int time_id) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            auto it = k.t.find(time_id);
            if (it == k.t.end()) continue;
            CKey nk = k;
            int p = it->second;
            if (p == 1)
                nk.t.erase(time_id);
            else
                nk.t[time_id] = p - 1;
            r.add_term(nk, s.scale_by(Rat(p)));
        }
        return r;
    }

    Coeff integrate_time(int time_id) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            CKey nk = k;
            int p = ++nk.t[time_id];
            r.add_term(nk, s.scale_by(Rat(1, p)));
        }
        return r;
    }

    // Multiply by the time variable itself.
    Coeff mul_time(int time_id) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            CKey nk = k;
            nk.t[time_id] += 1;
            r.add_term(nk, s);
        }
        return r;
    }

    Coeff subst_time_zero(int time_id) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_)
            if (!k.t.count(time_id)) r.terms_[k] = s;
        return r;
    }

    Coeff keep_time_free() const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_)
            if (k.t.empty()) r.terms_[k] = s;
        return r;
    }

    int total_time_degree(const CKey& k) const {
        int d = 0;
        for (const auto& [id, p] : k.t) {
            (void)id;
            d += p;
        }
        return d;
    }

    // Part of exact total time degree d.
    Coeff time_degree_part(int d) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_)
            if (total_time_degree(k) == d) r.terms_[k] = s;
        return r;
    }

    int max_time_degree() const {
        int d = 0;
        for (const auto& [k, s] : terms_) {
            (void)s;
            d = std::max(d, total_time_degree(k));
        }
        return d;
    }

    // Remap time ids (e.g. copy 0 -> copy 1). Ids absent from the map stay.
    Coeff remap_times(const std::map<int, int>& idmap) const {
        Coeff r(ctx_);
        for (const auto& [k, s] : terms_) {
            CKey nk = k;
            nk.t.clear();
            for (const auto& [id, p] : k.t) {
                auto it = idmap.find(id);
                nk.t[it == idmap.end() ? id : it->second] += p;
            }
            r.add_term(nk, s);
        }
        return r;
    }

    // The time-free part viewed as a unit u = s * eps^b * E(e): single
    // time-free term, x-free. Everything else must carry a time factor.
    std::pair<CKey, Scalar> unit_part() const {
        const CKey* key = nullptr;
        const Scalar* val = nullptr;
        for (const auto& [k, s] : terms_) {
            if (!k.t.empty()) continue;
            if (key) throw NonUnitLeading("multiple time-free terms");
            key = &k;
            val = &s;
        }
        if (!key) throw NonUnitLeading("zero time-free part");
        if (key->a != 0) throw NonUnitLeading("x-dependent time-free part");
        return {*key, *val};
    }

    Coeff invert_unit() const {
        auto [k0, s0] = unit_part();
        CKey ik;
        ik.b = -k0.b;
        ik.e = mono_pow(k0.e, -1);
        Coeff uinv = term(ctx_, ik, s0.inv());
        Coeff rest = *this - term(ctx_, k0, s0);
        // (u + R)^{-1} = u^{-1} sum_j (-u^{-1} R)^j ; R is time-nilpotent.
        Coeff w = -(uinv * rest);
        Coeff acc = one(ctx_);
        Coeff p = one(ctx_);
        while (true) {
            p = p * w;
            if (p.is_zero()) break;
            acc = acc + p;
        }
        return uinv * acc;
    }

    // Logarithm of a unit whose time-free part is a plain symbol monomial
    // times an exponential-generator factor (coefficient must be exactly 1).
    Coeff log_unit() const {
        auto [k0, s0] = unit_part();
        if (k0.b != 0) throw Error("log of eps power not representable");
        auto mo = s0.as_monomial();
        if (!mo || !(mo->second == ctx_->ring().one()))
            throw Error("log of non-monomial unit not representable");
        Coeff lg = zero(ctx_);
        for (const auto& [sym, p] : mo->first) {
            int ls = ctx_->log_sym(sym);
            if (ls < 0) throw Error("symbol without logarithm: " + ctx_->symbol_name(sym));
            lg = lg + from_scalar(ctx_, Scalar::sym(ctx_, ls).scale_by(Rat(p)));
        }
        for (const auto& [g, eg] : k0.e) {
            int ls = ctx_->log_sym(g);
            if (ls < 0) throw Error("generator without logarithm: " + ctx_->symbol_name(g));
            CKey xk;
            xk.a = 1;
            xk.b = -1;
            lg = lg + term(ctx_, xk, Scalar::sym(ctx_, ls).scale_by(Rat(eg)));
        }
        // log(1 + u^{-1} R) with R the time-positive remainder
        Coeff u = term(ctx_, k0, s0);
        Coeff w = invert_unit_of(u) * (*this - u);
        Coeff p = one(ctx_);
        int j = 0;
        while (true) {
            p = p * w;
            ++j;
            if (p.is_zero()) break;
            lg = lg + p.scale_rat(Rat((j % 2) ? 1 : -1, j));
        }
        return lg;
    }

    // exp of a quasi-linear argument: the time-free part must be a Z-linear
    // combination of log-symbols times (x/eps) or constants, which maps back
    // to exponential generators; the rest is time-nilpotent.
    Coeff exp_quasi() const {
        Mono egen;         // exponent vector from (x/eps) log terms
        Mono const_mono;   // symbol powers from constant log terms
        Coeff rest = zero(ctx_);
        for (const auto& [k, s] : terms_) {
            if (!k.t.empty()) {
                rest.add_term(k, s);
                continue;
            }
            bool xeps = (k.a == 1 && k.b == -1 && k.e.empty());
            bool cst = (k.a == 0 && k.b == 0 && k.e.empty());
            if (!xeps && !cst)
                throw Error("exp argument has non-quasi-linear time-free term");
            // scalar must be sum of integer multiples of log symbols
            if (!(s.den().size() == 1 && s.den().begin()->first.empty()))
                throw Error("exp argument with non-polynomial scalar");
            Cyc dc = s.den().begin()->second;
            for (const auto& [mono, c] : s.num()) {
                if (mono.size() != 1 || mono.begin()->second != 1)
                    throw Error("exp argument term is not linear in a log symbol");
                int ls = mono.begin()->first;
                int base = ctx_->info(ls).log_of;
                if (base < 0) throw Error("exp argument not a log symbol");
                Cyc ratio = ctx_->ring().mul(c, ctx_->ring().inv(dc));
                Rat q;
                {
                    bool rational = true;
                    for (std::size_t i = 1; i < ratio.size(); ++i)
                        if (ratio[i] != 0) rational = false;
                    if (!rational) throw Error("non-rational exp exponent");
                    q = ratio[0];
                }
                if (boost::multiprecision::denominator(q) != 1)
                    throw Error("non-integer exp exponent");
                int nint = static_cast<int>(boost::multiprecision::numerator(q));
                if (xeps) {
                    egen[base] += nint;
                    if (egen[base] == 0) egen.erase(base);
                } else {
                    const_mono[base] += nint;
                    if (const_mono[base] == 0) const_mono.erase(base);
                }
            }
        }
        CKey uk;
        uk.e = egen;
        Coeff result = term(ctx_, uk, Scalar::monomial(ctx_, const_mono, ctx_->ring().one()));
        // times exp(rest), rest nilpotent
        Coeff acc = one(ctx_);
        Coeff p = one(ctx_);
        Rat fact = 1;
        int j = 0;
        while (true) {
            p = p * rest;
            ++j;
            fact *= j;
            if (p.is_zero()) break;
            acc = acc + p.scale_rat(1 / fact);
        }
        return result * acc;
    }

    friend bool operator==(const Coeff& u, const Coeff& v) { return (u - v).is_zero(); }
    friend bool operator!=(const Coeff& u, const Coeff& v) { return !(u == v); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [k, s] : terms_) {
            if (!out.empty()) out += " + ";
            out += "[" + s.str() + "]";
            if (k.a) out += "*x^" + std::to_string(k.a);
            if (k.b) out += "*eps^" + std::to_string(k.b);
            for (const auto& [g, e] : k.e)
                out += "*" + ctx_->symbol_name(g) + "^[" + std::to_string(e) + "x/eps]";
            for (const auto& [id, p] : k.t) {
                const TimeKey& tk = ctx_->time_key(id);
                out += "*q(" + std::to_string(tk.beta) + "," + std::to_string(tk.n) + ")";
                if (tk.copy) out += "'";
                if (p != 1) out += "^" + std::to_string(p);
            }
        }
        return out;
    }

private:
    static Coeff invert_unit_of(const Coeff& u) { return u.invert_unit(); }

    const Context* ctx_ = nullptr;
    std::map<CKey, Scalar> terms_;
};

} // namespace ebt
