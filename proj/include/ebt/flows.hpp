#pragma once

#include "ebt/lax.hpp"

namespace ebt {

// Hierarchy flow label: beta in [1, k+m], n >= 0. The (k, 0) slot is the
// x-translation and is not a registered time.
struct FlowIdx {
    int beta = 1;
    int n = 0;
};

// Scoped tightening of the context's time-degree caps. Intermediate products
// truncate to the scoped degree, which keeps graded computations (fixed total
// time degree) from dragging higher-degree terms along.
class TimeCapGuard {
public:
    TimeCapGuard(const Context* ctx, int cap)
        : ctx_(ctx), old0_(ctx->cap_copy[0]), old1_(ctx->cap_copy[1]) {
        ctx->cap_copy[0] = std::min(old0_, cap);
        ctx->cap_copy[1] = std::min(old1_, cap);
    }
    ~TimeCapGuard() {
        ctx_->cap_copy[0] = old0_;
        ctx_->cap_copy[1] = old1_;
    }
    TimeCapGuard(const TimeCapGuard&) = delete;
    TimeCapGuard& operator=(const TimeCapGuard&) = delete;

private:
    const Context* ctx_;
    int old0_, old1_;
};

namespace detail {

template <class F>
DOp dop_map(const DOp& v, F&& f) {
    DOp r = DOp::zero(v.ctx());
    for (const auto& [j, c] : v.comps()) {
        Coeff fc = f(c);
        if (!fc.is_zero()) r = r + DOp::from_coeff(fc, j);
    }
    return r;
}

template <class F>
DiffOp diffop_map(const DiffOp& a, F&& f) {
    std::map<int, DOp> m;
    for (const auto& [d, v] : a.coeffs()) {
        DOp w = dop_map(v, f);
        if (!w.is_zero()) m[d] = w;
    }
    return DiffOp::series(a.ctx(), m, a.supp(), a.window());
}

} // namespace detail

inline DiffOp time_part(const DiffOp& a, int deg) {
    return detail::diffop_map(a, [&](const Coeff& c) { return c.time_degree_part(deg); });
}

inline DiffOp diff_time(const DiffOp& a, int time_id) {
    return detail::diffop_map(a, [&](const Coeff& c) { return c.diff_time(time_id); });
}

inline DiffOp at_time_zero(const DiffOp& a) {
    return detail::diffop_map(a, [](const Coeff& c) { return c.keep_time_free(); });
}

// Re-band a window-tracked operator into an exact band operator, requiring
// every coefficient in [lo, hi] to be known.
inline DiffOp extract_band(const DiffOp& a, int lo, int hi) {
    std::map<int, DOp> m;
    for (int d = lo; d <= hi; ++d) {
        DOp v = a.at(d);
        if (!v.is_zero()) m[d] = v;
    }
    return DiffOp::from_map(a.ctx(), m);
}

// Flow generator B_n^beta:
//   beta in [1, k-1]:   (1/(eps k)) (-beta/k)_{-n-1} L^{n+1-beta/k}
//                       with L^{j/k} realized through the first dressing,
//   beta = k:           (2/(eps n!)) L^n (log L - (c_n/2)(1/k + 1/m) - (1/2) log Q),
//   beta in [k+1, k+m]: (1/(eps m)) ((beta-k)/m - 1)_{-n-1} L^{n+(beta-k)/m}
//                       through the second dressing.
inline DiffOp generator(const FlowIdx& idx, const DressingPair& dp) {
    const Context* ctx = dp.ctx;
    int k = ctx->k(), m = ctx->m();
    if (idx.beta < 1 || idx.beta > k + m || idx.n < 0)
        throw ConfigError("flow index out of range");
    Coeff einv = Coeff::eps_pow(ctx, -1, Scalar::one(ctx));
    if (idx.beta <= k - 1) {
        Rat c = pochhammer(Rat(-idx.beta, k), -idx.n - 1) / k;
        int j = k * (idx.n + 1) - idx.beta;
        return frac_power_k(dp, j).mul_coeff_left(einv).scale_rat(c);
    }
    if (idx.beta == k) {
        LogParts lp = log_parts(dp);
        Rat shift = harmonic(idx.n) * (Rat(1, k) + Rat(1, m)) / 2;
        DiffOp core =
            lp.log_full -
            DiffOp::from_map(ctx, {{0, DOp::from_coeff(dp.logQ.scale_rat(Rat(1, 2)) +
                                                       Coeff::from_rat(ctx, shift))}});
        DiffOp ln = DiffOp::identity(ctx);
        for (int i = 0; i < idx.n; ++i) ln = ln * dp.L;
        Rat c = Rat(2) / Rat(factorial(idx.n));
        return (ln * core).mul_coeff_left(einv).scale_rat(c);
    }
    int bm = idx.beta - k;
    Rat c = pochhammer(Rat(bm, m) - 1, -idx.n - 1) / m;
    return frac_power_m(dp, bm + idx.n * m).mul_coeff_left(einv).scale_rat(c);
}

// Lax flow: dL/dq_n^beta = [(B)_{>0}, L] = -[(B)_{<=0}, L].
inline DiffOp lax_rhs(const FlowIdx& idx, const DressingPair& dp) {
    DiffOp bp = generator(idx, dp).project_pos();
    return bp * dp.L - dp.L * bp;
}

inline DiffOp lax_rhs_nonpos(const FlowIdx& idx, const DressingPair& dp) {
    DiffOp bn = generator(idx, dp).project_nonpos();
    return dp.L * bn - bn * dp.L;
}

// Sato-Wilson flow of the dressing pair:
//   dP1/dq = (B)_{>0} P1,   dP2/dq = -(B)_{<=0} P2.
struct SatoRhs {
    DiffOp dP1, dP2;
};

inline SatoRhs sato_rhs(const FlowIdx& idx, const DressingPair& dp) {
    DiffOp b = generator(idx, dp);
    return {b.project_pos() * dp.P1, -(b.project_nonpos() * dp.P2)};
}

struct FlowSpec {
    FlowIdx idx;
    int time_id = -1;
};

// Integrate the Sato-Wilson system from the time-independent pair dp0 along
// the given flows, order by order in total time degree (radial integration:
// (d+1) P^{(d+1)} = sum_i q_i (RHS_i)^{(d)}, exact for compatible flows).
inline DressingPair evolve_pair(const DressingPair& dp0, const std::vector<FlowSpec>& flows,
                                int order) {
    const Context* ctx = dp0.ctx;
    int k = ctx->k(), m = ctx->m();
    for (const auto& f : flows) {
        if (f.time_id < 0 || f.time_id >= ctx->num_times())
            throw ConfigError("flow has no registered time");
        TimeKey key = ctx->time_key(f.time_id);
        if (key.beta != f.idx.beta || key.n != f.idx.n)
            throw ConfigError("flow index does not match its registered time");
    }
    DressingPair cur = dp0;
    auto refresh = [&](DressingPair& p) {
        p.P1i = p.P1.invert_up(static_cast<int>(p.P1.window().hi));
        p.P2i = p.P2.invert_down(static_cast<int>(-p.P2.window().lo));
        p.L = extract_band(conj_k(p), -k, m);
    };
    for (int d = 0; d < order; ++d) {
        // the degree-d slice of each RHS is assembled from degree-<=d data
        // only, so cap the ambient time degree while computing it
        std::vector<DiffOp> parts1, parts2;
        {
            TimeCapGuard guard(ctx, d);
            DressingPair work = cur;
            if (d > 0) refresh(work);
            for (const auto& f : flows) {
                SatoRhs r = sato_rhs(f.idx, work);
                parts1.push_back(time_part(r.dP1, d));
                parts2.push_back(time_part(r.dP2, d));
            }
        }
        DiffOp inc1 = DiffOp::zero(ctx), inc2 = DiffOp::zero(ctx);
        for (std::size_t i = 0; i < flows.size(); ++i) {
            Coeff tm = Coeff::time(ctx, flows[i].time_id, Scalar::one(ctx))
                           .scale_rat(Rat(1, d + 1));
            inc1 = inc1 + parts1[i].mul_coeff_left(tm);
            inc2 = inc2 + parts2[i].mul_coeff_left(tm);
        }
        if (inc1.stored_all_zero() && inc2.stored_all_zero()) break;
        cur.P1 = cur.P1 + inc1;
        cur.P2 = cur.P2 + inc2;
    }
    refresh(cur);
    return cur;
}

// Flatness residual of the induced connection at q = 0:
//   d_A (B_B)_{>0} - d_B (B_A)_{>0} + [(B_B)_{>0}, (B_A)_{>0}].
inline DiffOp zero_curvature(const FlowIdx& a, int time_a, const FlowIdx& b, int time_b,
                             const DressingPair& dp0) {
    // the residual only involves first-order time data
    TimeCapGuard guard(dp0.ctx, 1);
    DressingPair ev = evolve_pair(dp0, {{a, time_a}, {b, time_b}}, 1);
    std::int64_t c = dp0.depth;
    DiffOp ba = generator(a, ev).project_pos().clip_window(-c, c);
    DiffOp bb = generator(b, ev).project_pos().clip_window(-c, c);
    DiffOp da_bb = at_time_zero(diff_time(bb, time_a));
    DiffOp db_ba = at_time_zero(diff_time(ba, time_b));
    DiffOp ba0 = at_time_zero(ba), bb0 = at_time_zero(bb);
    return da_bb - db_ba + (bb0 * ba0 - ba0 * bb0);
}

} // namespace ebt
