#pragma once

#include "ebt/coeff.hpp"

namespace ebt {

// Polynomial in D = eps * d/dx with Coeff coefficients (coefficients on the
// left). Multiplication uses D^i f = sum_r C(i,r) (eps d/dx)^r(f) D^{i-r}.
class DOp {
public:
    DOp() = default;
    explicit DOp(const Context* ctx) : ctx_(ctx) {}

    static DOp zero(const Context* ctx) { return DOp(ctx); }

    static DOp from_coeff(const Coeff& c, int dpow = 0) {
        DOp r(c.ctx());
        r.set(dpow, c);
        return r;
    }

    static DOp one(const Context* ctx) { return from_coeff(Coeff::one(ctx)); }
    static DOp d(const Context* ctx) { return from_coeff(Coeff::one(ctx), 1); }

    const Context* ctx() const { return ctx_; }
    const std::map<int, Coeff>& comps() const { return comp_; }
    bool is_zero() const { return comp_.empty(); }

    bool is_d_free() const {
        for (const auto& [j, c] : comp_)
            if (j != 0 && !c.is_zero()) return false;
        return true;
    }

    Coeff at(int j) const {
        auto it = comp_.find(j);
        return it == comp_.end() ? Coeff::zero(ctx_) : it->second;
    }

    Coeff scalar_part() const { return at(0); }

    void set(int j, const Coeff& c) {
        if (j < 0) throw Error("negative D-power");
        if (c.is_zero())
            comp_.erase(j);
        else
            comp_[j] = c;
    }

    void add_at(int j, const Coeff& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = comp_.emplace(j, c);
        if (!fresh) {
            it->second = it->second + c;
            if (it->second.is_zero()) comp_.erase(it);
        }
    }

    friend DOp operator+(const DOp& u, const DOp& v) {
        DOp r = u;
        for (const auto& [j, c] : v.comp_) r.add_at(j, c);
        return r;
    }

    friend DOp operator-(const DOp& u, const DOp& v) {
        DOp r = u;
        for (const auto& [j, c] : v.comp_) r.add_at(j, -c);
        return r;
    }

    DOp operator-() const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) r.comp_[j] = -c;
        return r;
    }

    friend DOp operator*(const DOp& u, const DOp& v) {
        DOp r(u.ctx_);
        for (const auto& [i, a] : u.comp_)
            for (const auto& [j, b] : v.comp_) {
                Coeff der = b;
                for (int s = 0; s <= i; ++s) {
                    if (!der.is_zero())
                        r.add_at(i - s + j, (a * der).scale_rat(Rat(binomial(i, s))));
                    if (s < i) der = der.eps_dx();
                }
            }
        return r;
    }

    DOp scale(const Scalar& s) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) {
            Coeff v = c.scale(s);
            if (!v.is_zero()) r.comp_[j] = v;
        }
        return r;
    }

    DOp scale_rat(const Rat& q) const {
        DOp r(ctx_);
        if (q == 0) return r;
        for (const auto& [j, c] : comp_) r.comp_[j] = c.scale_rat(q);
        return r;
    }

    DOp mul_coeff_left(const Coeff& f) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) {
            Coeff v = f * c;
            if (!v.is_zero()) r.comp_[j] = v;
        }
        return r;
    }

    DOp shift_x(long s) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) {
            Coeff v = c.shift_x(s);
            if (!v.is_zero()) r.comp_[j] = v;
        }
        return r;
    }

    DOp mul_eps(int db) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) r.comp_[j] = c.mul_eps(db);
        return r;
    }

    DOp remap_times(const std::map<int, int>& idmap) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) {
            Coeff v = c.remap_times(idmap);
            if (!v.is_zero()) r.comp_[j] = v;
        }
        return r;
    }

    DOp time_degree_part(int d) const {
        DOp r(ctx_);
        for (const auto& [j, c] : comp_) {
            Coeff v = c.time_degree_part(d);
            if (!v.is_zero()) r.comp_[j] = v;
        }
        return r;
    }

    int max_time_degree() const {
        int d = 0;
        for (const auto& [j, c] : comp_) {
            (void)j;
            d = std::max(d, c.max_time_degree());
        }
        return d;
    }

    friend bool operator==(const DOp& u, const DOp& v) { return (u - v).is_zero(); }
    friend bool operator!=(const DOp& u, const DOp& v) { return !(u == v); }

    std::string str() const {
        if (comp_.empty()) return "0";
        std::string out;
        for (const auto& [j, c] : comp_) {
            if (!out.empty()) out += " + ";
            out += "(" + c.str() + ")";
            if (j == 1) out += "*D";
            if (j > 1) out += "*D^" + std::to_string(j);
        }
        return out;
    }

private:
    const Context* ctx_ = nullptr;
    std::map<int, Coeff> comp_;
};

} // namespace ebt
