#pragma once

#include <cstdint>
#include <limits>

#include "ebt/dop.hpp"

namespace ebt {

// Saturating interval arithmetic for Lambda-degree bookkeeping.
namespace win {

constexpr std::int64_t NEG = std::numeric_limits<std::int64_t>::min() / 4;
constexpr std::int64_t POS = std::numeric_limits<std::int64_t>::max() / 4;

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    if (a <= NEG || b <= NEG) return NEG;
    if (a >= POS || b >= POS) return POS;
    return a + b;
}

struct Iv {
    std::int64_t lo = POS;
    std::int64_t hi = NEG;

    bool empty() const { return lo > hi; }
    bool contains(std::int64_t d) const { return lo <= d && d <= hi; }

    static Iv full() { return {NEG, POS}; }
    static Iv none() { return {POS, NEG}; }
    static Iv of(std::int64_t lo, std::int64_t hi) { return {lo, hi}; }

    friend Iv hull(const Iv& a, const Iv& b) {
        if (a.empty()) return b;
        if (b.empty()) return a;
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
    friend Iv intersect(const Iv& a, const Iv& b) {
        return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    }
    friend Iv minkowski(const Iv& a, const Iv& b) {
        if (a.empty() || b.empty()) return none();
        return {sat_add(a.lo, b.lo), sat_add(a.hi, b.hi)};
    }
    Iv shifted(std::int64_t j) const {
        if (empty()) return *this;
        return {sat_add(lo, j), sat_add(hi, j)};
    }
    friend bool operator==(const Iv& a, const Iv& b) {
        if (a.empty() && b.empty()) return true;
        return a.lo == b.lo && a.hi == b.hi;
    }
};

} // namespace win

// Difference-Lambda operator A = sum_s a_s(x, D) Lambda^s with coefficients
// on the left of the shift, Lambda^s f(x) = f(x + eps s) Lambda^s.
//
// `supp` bounds the degrees on which A may be nonzero; `win` is the interval
// of degrees on which the coefficients are actually known. Degrees outside
// `supp` are known to be zero, so `win` is folded to infinity whenever it
// reaches a support edge. Reading a coefficient inside `supp` but outside
// `win` raises WindowMiss.
class DiffOp {
public:
    DiffOp() = default;

    static DiffOp zero(const Context* ctx) {
        DiffOp r;
        r.ctx_ = ctx;
        r.supp_ = win::Iv::none();
        r.win_ = win::Iv::full();
        return r;
    }

    // Exactly known operator from an explicit finite coefficient map.
    static DiffOp from_map(const Context* ctx, const std::map<int, DOp>& m) {
        DiffOp r = zero(ctx);
        for (const auto& [d, a] : m)
            if (!a.is_zero()) {
                r.c_[d] = a;
                r.supp_ = hull(r.supp_, win::Iv::of(d, d));
            }
        return r;
    }

    static DiffOp lambda_pow(const Context* ctx, int j) {
        return from_map(ctx, {{j, DOp::one(ctx)}});
    }

    static DiffOp identity(const Context* ctx) { return lambda_pow(ctx, 0); }

    // Partially known operator: coefficients hold on `win` only.
    static DiffOp series(const Context* ctx, const std::map<int, DOp>& m, win::Iv supp,
                         win::Iv wn) {
        DiffOp r;
        r.ctx_ = ctx;
        r.supp_ = supp;
        r.win_ = wn;
        r.c_ = m;
        r.tidy();
        return r;
    }

    const Context* ctx() const { return ctx_; }
    const std::map<int, DOp>& coeffs() const { return c_; }
    win::Iv supp() const { return supp_; }
    win::Iv window() const { return win_; }

    bool known(std::int64_t d) const {
        if (supp_.empty()) return true;
        if (d < supp_.lo || d > supp_.hi) return true;
        return win_.contains(d);
    }

    bool fully_known() const {
        if (supp_.empty()) return true;
        return win_.lo <= supp_.lo && win_.hi >= supp_.hi;
    }

    DOp at(std::int64_t d) const {
        if (!known(d))
            throw WindowMiss("coefficient at Lambda^" + std::to_string(d));
        auto it = c_.find(static_cast<int>(d));
        return it == c_.end() ? DOp::zero(ctx_) : it->second;
    }

    DOp res_lambda() const { return at(0); }

    friend DiffOp operator+(const DiffOp& u, const DiffOp& v) {
        DiffOp r;
        r.ctx_ = u.ctx_;
        r.supp_ = hull(u.supp_, v.supp_);
        r.win_ = intersect(u.known_iv(), v.known_iv());
        r.c_ = u.c_;
        for (const auto& [d, a] : v.c_) {
            auto [it, fresh] = r.c_.emplace(d, a);
            if (!fresh) {
                it->second = it->second + a;
                if (it->second.is_zero()) r.c_.erase(it);
            }
        }
        r.tidy();
        return r;
    }

    friend DiffOp operator-(const DiffOp& u, const DiffOp& v) { return u + (-v); }

    DiffOp operator-() const {
        DiffOp r = *this;
        for (auto& [d, a] : r.c_) a = -a;
        return r;
    }

    friend DiffOp operator*(const DiffOp& u, const DiffOp& v) {
        return mul_clipped(u, v, win::Iv::full());
    }

    // Product restricted to result degrees in `clip`: degrees outside become
    // unknown (never silently zero), and their coefficient work is skipped.
    static DiffOp mul_clipped(const DiffOp& u, const DiffOp& v, win::Iv clip) {
        DiffOp r;
        r.ctx_ = u.ctx_;
        if (u.supp_.empty() || v.supp_.empty()) return zero(u.ctx_);
        r.supp_ = minkowski(u.supp_, v.supp_);
        // Degrees never reached by an unknown coefficient of one factor
        // paired with the full support of the other.
        win::Iv w = clip;
        if (u.win_.lo > win::NEG) w.lo = std::max(w.lo, win::sat_add(u.win_.lo, v.supp_.hi));
        if (v.win_.lo > win::NEG) w.lo = std::max(w.lo, win::sat_add(v.win_.lo, u.supp_.hi));
        if (u.win_.hi < win::POS) w.hi = std::min(w.hi, win::sat_add(u.win_.hi, v.supp_.lo));
        if (v.win_.hi < win::POS) w.hi = std::min(w.hi, win::sat_add(v.win_.hi, u.supp_.lo));
        r.win_ = w;
        win::Iv keep = intersect(r.win_, r.supp_);
        if (!keep.empty())
            for (const auto& [s, a] : u.c_)
                for (const auto& [t, b] : v.c_) {
                    int d = s + t;
                    if (d < keep.lo || d > keep.hi) continue;
                    DOp prod = a * b.shift_x(s);
                    if (prod.is_zero()) continue;
                    auto [it, fresh] = r.c_.emplace(d, prod);
                    if (!fresh) {
                        it->second = it->second + prod;
                        if (it->second.is_zero()) r.c_.erase(it);
                    }
                }
        r.tidy();
        return r;
    }

    DiffOp scale(const Scalar& s) const {
        DiffOp r = *this;
        r.c_.clear();
        if (s.is_zero()) {
            // zero times unknown is still zero
            r.supp_ = win::Iv::none();
            r.win_ = win::Iv::full();
            return r;
        }
        for (const auto& [d, a] : c_) r.c_[d] = a.scale(s);
        return r;
    }

    DiffOp scale_rat(const Rat& q) const { return scale(Scalar::from_rat(ctx_, q)); }

    DiffOp mul_coeff_left(const Coeff& f) const {
        DiffOp r = *this;
        r.c_.clear();
        if (f.is_zero()) {
            r.supp_ = win::Iv::none();
            r.win_ = win::Iv::full();
            return r;
        }
        for (const auto& [d, a] : c_) {
            DOp v = a.mul_coeff_left(f);
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    DiffOp mul_dop_left(const DOp& f) const {
        DiffOp r = *this;
        r.c_.clear();
        if (f.is_zero()) {
            r.supp_ = win::Iv::none();
            r.win_ = win::Iv::full();
            return r;
        }
        for (const auto& [d, a] : c_) {
            DOp v = f * a;
            if (!v.is_zero()) r.c_[d] = v;
        }
        return r;
    }

    // Lambda^j A Lambda^{-j}: coefficients move by j*eps in x.
    DiffOp conj_shift(long j) const {
        DiffOp r = *this;
        r.c_.clear();
        for (const auto& [d, a] : c_) r.c_[d] = a.shift_x(j);
        return r;
    }

    // Lambda^j * A
    DiffOp lmul_lambda(int j) const {
        DiffOp r = zero(ctx_);
        r.supp_ = supp_.shifted(j);
        r.win_ = win_.shifted(j);
        for (const auto& [d, a] : c_) r.c_[d + j] = a.shift_x(j);
        return r;
    }

    // A * Lambda^j
    DiffOp rmul_lambda(int j) const {
        DiffOp r = zero(ctx_);
        r.supp_ = supp_.shifted(j);
        r.win_ = win_.shifted(j);
        for (const auto& [d, a] : c_) r.c_[d + j] = a;
        return r;
    }

    // (A)_{>0}: restrict support to degrees >= 1.
    DiffOp project_pos() const {
        DiffOp r = *this;
        r.supp_ = intersect(supp_, win::Iv::of(1, win::POS));
        r.c_.erase(r.c_.begin(), r.c_.lower_bound(1));
        r.tidy();
        return r;
    }

    // (A)_{<=0}
    DiffOp project_nonpos() const {
        DiffOp r = *this;
        r.supp_ = intersect(supp_, win::Iv::of(win::NEG, 0));
        r.c_.erase(r.c_.upper_bound(0), r.c_.end());
        r.tidy();
        return r;
    }

    // Inverse of A = 1 + (positive-degree part), computed through degree `upto`.
    DiffOp invert_up(int upto) const {
        if (supp_.empty() || supp_.lo != 0)
            throw NonUnitLeading("inverse needs support starting at Lambda^0");
        if (!known(0) || !(at(0) == DOp::one(ctx_)))
            throw NonUnitLeading("inverse needs leading coefficient 1 at Lambda^0");
        std::int64_t hi = std::min<std::int64_t>(upto, win_.hi);
        DiffOp r = zero(ctx_);
        r.supp_ = win::Iv::of(0, win::POS);
        r.win_ = win::Iv::of(win::NEG, hi);
        std::map<int, DOp> b;
        b[0] = DOp::one(ctx_);
        for (int d = 1; d <= hi; ++d) {
            DOp acc = DOp::zero(ctx_);
            for (const auto& [s, a] : c_) {
                if (s < 1 || s > d) continue;
                auto it = b.find(d - s);
                if (it == b.end()) continue;
                acc = acc + a * it->second.shift_x(s);
            }
            if (!acc.is_zero()) b[d] = -acc;
        }
        r.c_ = std::move(b);
        r.tidy();
        return r;
    }

    // Inverse of A = p_0 + (negative-degree part) with unit p_0, through
    // degree -downto.
    DiffOp invert_down(int downto) const {
        if (supp_.empty() || supp_.hi != 0)
            throw NonUnitLeading("inverse needs support ending at Lambda^0");
        if (!known(0)) throw WindowMiss("leading coefficient unknown");
        DOp p0 = at(0);
        if (!p0.is_d_free()) throw NonUnitLeading("leading coefficient carries D");
        Coeff u = p0.scalar_part().invert_unit();
        std::int64_t lo = std::max<std::int64_t>(-downto, win_.lo);
        // M = p0^{-1} A = 1 + lower terms
        std::map<int, DOp> mm;
        for (const auto& [d, a] : c_) mm[d] = a.mul_coeff_left(u);
        std::map<int, DOp> b;
        b[0] = DOp::one(ctx_);
        for (int d = -1; d >= lo; --d) {
            DOp acc = DOp::zero(ctx_);
            for (const auto& [s, a] : mm) {
                if (s > -1 || s < d) continue;
                auto it = b.find(d - s);
                if (it == b.end()) continue;
                acc = acc + a * it->second.shift_x(s);
            }
            if (!acc.is_zero()) b[d] = -acc;
        }
        // A^{-1} = M^{-1} p0^{-1}
        DiffOp r = zero(ctx_);
        r.supp_ = win::Iv::of(win::NEG, 0);
        r.win_ = win::Iv::of(lo, win::POS);
        for (const auto& [d, bb] : b) {
            DOp v = bb * DOp::from_coeff(u.shift_x(d));
            if (!v.is_zero()) r.c_[d] = v;
        }
        r.tidy();
        return r;
    }

    // Narrow the known window (degrees outside become unknown, not zero).
    // Downstream products then skip coefficients the caller will not read.
    DiffOp clip_window(std::int64_t lo, std::int64_t hi) const {
        DiffOp r = *this;
        r.win_ = intersect(r.win_, win::Iv::of(lo, hi));
        r.tidy();
        return r;
    }

    bool equal_on(const DiffOp& other, std::int64_t lo, std::int64_t hi) const {
        for (std::int64_t d = lo; d <= hi; ++d)
            if (!(at(d) == other.at(d))) return false;
        return true;
    }

    bool is_zero_on(std::int64_t lo, std::int64_t hi) const {
        for (std::int64_t d = lo; d <= hi; ++d)
            if (!at(d).is_zero()) return false;
        return true;
    }

    // All stored (known) coefficients are free of D^j, j >= 1.
    bool is_d_free_known() const {
        for (const auto& [d, a] : c_) {
            (void)d;
            if (!a.is_d_free()) return false;
        }
        return true;
    }

    bool stored_all_zero() const { return c_.empty(); }

    std::string str() const {
        std::string out;
        for (const auto& [d, a] : c_) {
            if (!out.empty()) out += "  +  ";
            out += "{" + a.str() + "} L^" + std::to_string(d);
        }
        if (out.empty()) out = "0";
        auto b = [](std::int64_t v) {
            if (v <= win::NEG) return std::string("-inf");
            if (v >= win::POS) return std::string("+inf");
            return std::to_string(v);
        };
        out += "   supp[" + b(supp_.lo) + "," + b(supp_.hi) + "] win[" + b(win_.lo) + "," +
               b(win_.hi) + "]";
        return out;
    }

private:
    // Effective known interval (window folded over known-zero margins).
    win::Iv known_iv() const {
        if (supp_.empty()) return win::Iv::full();
        win::Iv w = win_;
        if (w.lo <= supp_.lo) w.lo = win::NEG;
        if (w.hi >= supp_.hi) w.hi = win::POS;
        return w;
    }

    void tidy() {
        if (supp_.empty()) {
            win_ = win::Iv::full();
            c_.clear();
            return;
        }
        // shrink support to stored extent when fully known
        win_ = known_iv();
        for (auto it = c_.begin(); it != c_.end();) {
            std::int64_t d = it->first;
            bool keep = !it->second.is_zero() && supp_.contains(d) && win_.contains(d);
            it = keep ? std::next(it) : c_.erase(it);
        }
        if (fully_known()) {
            // exact operator: tighten supp to the nonzero extent
            if (c_.empty()) {
                supp_ = win::Iv::none();
                win_ = win::Iv::full();
            } else {
                supp_ = win::Iv::of(c_.begin()->first, c_.rbegin()->first);
                win_ = win::Iv::full();
            }
        }
    }

    const Context* ctx_ = nullptr;
    std::map<int, DOp> c_;
    win::Iv supp_ = win::Iv::none();
    win::Iv win_ = win::Iv::full();
};

// Exact Laurent series in zeta with DOp coefficients; used for the left and
// right symbols of fully known operators. Multiplication is plain
// convolution (no x-shift): zeta is a formal scalar variable.
class ZetaSeries {
public:
    ZetaSeries() = default;
    explicit ZetaSeries(const Context* ctx) : ctx_(ctx) {}

    static ZetaSeries zero(const Context* ctx) { return ZetaSeries(ctx); }

    static ZetaSeries one(const Context* ctx) {
        ZetaSeries r(ctx);
        r.c_[0] = DOp::one(ctx);
        return r;
    }

    const Context* ctx() const { return ctx_; }
    const std::map<int, DOp>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    DOp at(int d) const {
        auto it = c_.find(d);
        return it == c_.end() ? DOp::zero(ctx_) : it->second;
    }

    void add_at(int d, const DOp& a) {
        if (a.is_zero()) return;
        auto [it, fresh] = c_.emplace(d, a);
        if (!fresh) {
            it->second = it->second + a;
            if (it->second.is_zero()) c_.erase(it);
        }
    }

    friend ZetaSeries operator+(const ZetaSeries& u, const ZetaSeries& v) {
        ZetaSeries r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d, a);
        return r;
    }

    friend ZetaSeries operator-(const ZetaSeries& u, const ZetaSeries& v) {
        ZetaSeries r = u;
        for (const auto& [d, a] : v.c_) r.add_at(d, -a);
        return r;
    }

    friend ZetaSeries operator*(const ZetaSeries& u, const ZetaSeries& v) {
        ZetaSeries r(u.ctx_);
        for (const auto& [s, a] : u.c_)
            for (const auto& [t, b] : v.c_) r.add_at(s + t, a * b);
        return r;
    }

    ZetaSeries scale(const Scalar& s) const {
        ZetaSeries r(ctx_);
        if (s.is_zero()) return r;
        for (const auto& [d, a] : c_) r.c_[d] = a.scale(s);
        return r;
    }

    // zeta -> q * zeta: coefficient at degree d picks up q^d.
    ZetaSeries scale_zeta(const Scalar& q) const {
        ZetaSeries r(ctx_);
        for (const auto& [d, a] : c_) r.c_[d] = a.scale(q.pow_int(d));
        return r;
    }

    ZetaSeries zeta_inverse() const {
        ZetaSeries r(ctx_);
        for (const auto& [d, a] : c_) r.c_[-d] = a;
        return r;
    }

    ZetaSeries mul_zeta_pow(int j) const {
        ZetaSeries r(ctx_);
        for (const auto& [d, a] : c_) r.c_[d + j] = a;
        return r;
    }

    friend bool operator==(const ZetaSeries& u, const ZetaSeries& v) {
        return (u - v).is_zero();
    }

private:
    const Context* ctx_ = nullptr;
    std::map<int, DOp> c_;
};

// sigma_l(A) = sum a_s zeta^s for A = sum a_s Lambda^s.
inline ZetaSeries symbol_left(const DiffOp& a) {
    if (!a.fully_known()) throw WindowMiss("left symbol of a partially known operator");
    ZetaSeries r(a.ctx());
    for (const auto& [d, v] : a.coeffs()) r.add_at(d, v);
    return r;
}

// sigma_r(A) = sum a~_s zeta^s with A = sum Lambda^s a~_s, a~_s(x) = a_s(x - eps s).
inline ZetaSeries symbol_right(const DiffOp& a) {
    if (!a.fully_known()) throw WindowMiss("right symbol of a partially known operator");
    ZetaSeries r(a.ctx());
    for (const auto& [d, v] : a.coeffs()) r.add_at(d, v.shift_x(-d));
    return r;
}

// res over zeta of f dzeta/zeta: the zeta^0 coefficient.
inline DOp res_zeta(const ZetaSeries& f) { return f.at(0); }

} // namespace ebt
