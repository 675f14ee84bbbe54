#pragma once

#include <vector>

#include "ebt/lax.hpp"
#include "ebt/zc.hpp"

namespace ebt {

// ===== log-tau data =====

// A tau function is carried as F = log tau, a quasi-polynomial in x, the
// exponential generators and the time variables of one copy. The
// x-dependence plays the role of the distinguished zeroth logarithmic
// direction, so no separate variable is stored for it.
struct TauData {
    const Context* ctx = nullptr;
    Coeff F;
    int copy = 0;
};

// Remap a tau to the other copy's time variables (the twin keys must be
// registered).
inline TauData tau_to_copy(const TauData& tau, int copy) {
    const Context* ctx = tau.ctx;
    if (copy == tau.copy) return tau;
    std::map<int, int> idmap;
    for (int id = 0; id < ctx->num_times(); ++id) {
        TimeKey key = ctx->time_key(id);
        if (key.copy != tau.copy) continue;
        TimeKey twin = key;
        twin.copy = copy;
        int tid = ctx->time_id(twin);
        if (tid < 0) throw ConfigError("twin time not registered: copy remap");
        idmap[id] = tid;
    }
    return {ctx, tau.F.remap_times(idmap), copy};
}

// Sum of the time-degree-0..d parts.
inline Coeff time_degree_upto(const Coeff& c, int d) {
    Coeff r = Coeff::zero(c.ctx());
    for (int i = 0; i <= d && i <= c.max_time_degree(); ++i)
        r = r + c.time_degree_part(i);
    return r;
}

// ===== discrete shift vectors =====

// The zeta-depth a time couples to in the family-f shift/wave columns;
// 0 means the time does not appear on that side.
inline int time_weight(const Context* ctx, const TimeKey& t, int family) {
    int k = ctx->k(), m = ctx->m();
    if (family == 1) {
        if (t.beta < k) return (t.n + 1) * k - t.beta;
        if (t.beta == k) return t.n * k;
        if (t.beta == k + m) return (t.n + 1) * k;
        return 0;
    }
    if (t.beta > k) return t.n * m + t.beta - k;
    if (t.beta == k) return t.n * m;
    return 0;
}

// The unique family-f shift-carrying time at depth w >= 1 (the logarithmic
// column beta = k never carries a shift component).
inline TimeKey shift_time_at_depth(const Context* ctx, int family, int w, int copy) {
    int k = ctx->k(), m = ctx->m();
    TimeKey key;
    key.copy = copy;
    if (family == 1) {
        int r = w % k;
        if (r != 0) {
            key.beta = k - r;
            key.n = (w - r) / k;
        } else {
            key.beta = k + m;
            key.n = w / k - 1;
        }
    } else {
        int r = w % m;
        if (r != 0) {
            key.beta = k + r;
            key.n = (w - r) / m;
        } else {
            key.beta = k + m;
            key.n = w / m - 1;
        }
    }
    return key;
}

struct ShiftComp {
    int time_id = -1;
    int deg = 0; // zeta-degree of the component (always negative)
    Rat coef;    // multiplies eps
};

struct ShiftVector {
    int family = 1;
    int copy = 0;
    int xshift = 0; // integer multiple of eps added to the x argument
    std::vector<ShiftComp> comps;

    ShiftVector negated() const {
        ShiftVector s = *this;
        s.xshift = -s.xshift;
        for (auto& c : s.comps) c.coef = -c.coef;
        return s;
    }
};

// S_i over the registered times of `copy`:
//   S_1[q_n^alpha]    = + eps (n - alpha/k)_n           at zeta^(alpha-(n+1)k)
//   S_1[q_n^{k+m}]    = + eps (m/k) n!                  at zeta^(-(n+1)k)
//   S_2[q_n^{k+m-a}]  = - eps (n - a/m)_n               at zeta^(a-(n+1)m)
//   S_2[q_n^{k+m}]    = - eps n!                        at zeta^(-(n+1)m)
// and S_2 carries the x-translation by -eps.
inline ShiftVector shift_vector(const Context* ctx, int family, int copy) {
    int k = ctx->k(), m = ctx->m();
    ShiftVector s;
    s.family = family;
    s.copy = copy;
    s.xshift = family == 2 ? -1 : 0;
    for (int id = 0; id < ctx->num_times(); ++id) {
        const TimeKey& t = ctx->time_key(id);
        if (t.copy != copy) continue;
        if (family == 1) {
            if (t.beta < k) {
                Rat q = Rat(t.n) - Rat(t.beta) / Rat(k);
                s.comps.push_back({id, t.beta - (t.n + 1) * k, pochhammer(q, t.n)});
            } else if (t.beta == k + m) {
                s.comps.push_back({id, -(t.n + 1) * k, Rat(m) / Rat(k) * Rat(factorial(t.n))});
            }
        } else {
            if (t.beta > k && t.beta < k + m) {
                int alpha = k + m - t.beta;
                Rat q = Rat(t.n) - Rat(alpha) / Rat(m);
                s.comps.push_back({id, alpha - (t.n + 1) * m, -pochhammer(q, t.n)});
            } else if (t.beta == k + m) {
                s.comps.push_back({id, -(t.n + 1) * m, -Rat(factorial(t.n))});
            }
        }
    }
    return s;
}

// Register every shift-carrying time of either family with coupling depth
// <= w, for both copies. Returns the number of registered keys.
inline int register_active_times(Context& ctx, int w) {
    int count = 0;
    for (int family = 1; family <= 2; ++family)
        for (int depth = 1; depth <= w; ++depth)
            for (int copy = 0; copy < 2; ++copy) {
                ctx.register_time(shift_time_at_depth(&ctx, family, depth, copy));
                ++count;
            }
    return count;
}

// Largest w such that every family-f shift time with depth <= w is
// registered for both copies (the usable coupling coverage).
inline int shift_cover(const Context* ctx, int family) {
    for (int w = 1;; ++w) {
        for (int copy = 0; copy < 2; ++copy)
            if (ctx->time_id(shift_time_at_depth(ctx, family, w, copy)) < 0) return w - 1;
        if (w > 4096) throw Error("shift cover unbounded");
    }
}

// ===== applying a shift to a quasi-polynomial =====

// f(x + eps*xshift, q + S) expanded over the registered times, truncated
// below zeta^{-depth}. Exact: f is polynomial in every time variable.
inline ZC apply_shift(const Context* ctx, const Coeff& f, const ShiftVector& s, int depth) {
    ZC cur = ZC::monomial(ctx, 0, s.xshift ? f.shift_x(s.xshift) : f);
    for (const auto& comp : s.comps) {
        Coeff step = Coeff::eps_pow(ctx, 1, Scalar::from_rat(ctx, comp.coef));
        ZC next(ctx);
        for (const auto& [d, c] : cur.coeffs()) {
            Coeff der = c;
            Coeff pw = Coeff::one(ctx);
            Rat fact(1);
            for (int j = 0;; ++j) {
                if (j > 0) {
                    der = der.diff_time(comp.time_id);
                    if (der.is_zero()) break;
                    pw = pw * step;
                    fact *= j;
                }
                int nd = d + comp.deg * j;
                if (nd < -depth) break;
                next.add_at(nd, j == 0 ? der : (der * pw).scale_rat(Rat(1) / fact));
            }
        }
        cur = next;
    }
    return cur;
}

// sum_u zeta^(deg_u) s_u d/dq_u applied to a series (coefficient-wise),
// truncated below zeta^{-depth}.
inline ZC shift_derivative(const Context* ctx, const ShiftVector& s, const ZC& f, int depth) {
    ZC out(ctx);
    for (const auto& comp : s.comps) {
        Coeff step = Coeff::eps_pow(ctx, 1, Scalar::from_rat(ctx, comp.coef));
        for (const auto& [d, c] : f.coeffs()) {
            int nd = d + comp.deg;
            if (nd < -depth) continue;
            out.add_at(nd, c.diff_time(comp.time_id) * step);
        }
    }
    return out;
}

// ===== dressing symbols =====

// P_i' as zeta-series read off a dressing pair: the family-1 series has
// coefficient p_j at zeta^{-j}, the family-2 series Q^j p_{-j} at zeta^{-j}.
inline ZC dressing_symbol(const DressingPair& dp, int family, int depth) {
    const Context* ctx = dp.ctx;
    ZC r(ctx);
    for (int j = 0; j <= depth; ++j) {
        Coeff c = family == 1 ? dp.P1.at(j).scalar_part()
                              : dp.P2.at(-j).scalar_part().scale(dp.Q.pow_int(j));
        if (!c.is_zero()) r.add_at(-j, c);
    }
    return r;
}

// ===== tau symbols =====

// P_i' = exp(F(q + S_i) - F) with the family-2 x-translation folded into the
// series (the primed normalization).
inline ZC symbol_P(const TauData& tau, int family, int depth) {
    ShiftVector s = shift_vector(tau.ctx, family, tau.copy);
    ZC g = apply_shift(tau.ctx, tau.F, s, depth);
    g.add_at(0, -tau.F);
    return g.exp_lower(-depth);
}

// P_i*' = exp(F(q - S_i) - F) (family 2 at x + eps).
inline ZC symbol_Pstar(const TauData& tau, int family, int depth) {
    ShiftVector s = shift_vector(tau.ctx, family, tau.copy).negated();
    ZC g = apply_shift(tau.ctx, tau.F, s, depth);
    g.add_at(0, -tau.F);
    return g.exp_lower(-depth);
}

// ===== reconstruction of log tau from a dressing =====

// Solves F(q + S_1) - F = log P_1' and F(x - eps, q + S_2) - F = log P_2'
// triangularly by zeta-depth for the first derivatives A_u = dF/dq_u, checks
// closedness, path-integrates, and fixes the pure-x part from the zeta^0
// sector of the family-2 equation. The logarithmic times (beta = k) carry no
// shift component and are left at gauge zero. Throws IncompatibleData if the
// dressing data is not a consistent tau slice. `use_depth` limits the
// coupling depth read off the dressing (evolution trims the reliable window
// of a pair below its construction depth); the default uses all of it.
inline TauData tau_reconstruct(const DressingPair& dp, int use_depth = -1) {
    const Context* ctx = dp.ctx;
    const int depth = use_depth < 0 ? dp.depth : use_depth;
    const int cap = ctx->cap_copy[0];

    ZC g1 = dressing_symbol(dp, 1, depth).log_lower(-depth);
    ZC g2 = dressing_symbol(dp, 2, depth).log_lower(-depth);

    std::map<int, Coeff> A; // solved first derivatives, by time id

    auto corrections = [&](const ShiftVector& s, int xoff, int j) {
        ZC psi(ctx);
        for (const auto& comp : s.comps) {
            auto it = A.find(comp.time_id);
            if (it == A.end()) continue;
            Coeff step = Coeff::eps_pow(ctx, 1, Scalar::from_rat(ctx, comp.coef));
            int nd = comp.deg;
            if (nd < -j) continue;
            psi.add_at(nd, (xoff ? it->second.shift_x(xoff) : it->second) * step);
        }
        ZC term = psi;
        Coeff corr = Coeff::zero(ctx);
        Rat fact(1);
        for (int p = 2; p <= j && !term.is_zero(); ++p) {
            term = shift_derivative(ctx, s, term, j);
            fact *= p;
            corr = corr + term.at(-j).scale_rat(Rat(1) / fact);
        }
        return corr;
    };

    int solved_depth[3] = {0, 0, 0};
    auto process_family = [&](int family) {
        const ZC& g = family == 1 ? g1 : g2;
        const int xoff = family == 2 ? -1 : 0;
        ShiftVector s = shift_vector(ctx, family, 0);
        std::map<int, ShiftComp> by_depth;
        for (const auto& comp : s.comps) by_depth[-comp.deg] = comp;
        for (int j = 1; j <= depth; ++j) {
            auto it = by_depth.find(j);
            if (it == by_depth.end()) break; // coupling coverage exhausted
            const ShiftComp& comp = it->second;
            Coeff rhs = g.at(-j) - corrections(s, xoff, j);
            Coeff a = rhs.mul_eps(-1).scale_rat(Rat(1) / comp.coef);
            if (xoff) a = a.shift_x(-xoff);
            auto known = A.find(comp.time_id);
            if (known != A.end()) {
                // the dressing pair carries a residual gauge: P_2 can be
                // multiplied on the right by any constant-coefficient series
                // without changing L or the wave identity, which scales the
                // P_2 symbol by a constant series in zeta. The two families
                // therefore pin each derivative only up to an x- and
                // time-free constant per coupling depth.
                Coeff d = time_degree_upto(known->second - a, cap - 1);
                Coeff dc = d.keep_time_free();
                if (!(d - dc).is_zero() || !dc.dx().is_zero())
                    throw IncompatibleData("derivative mismatch between the two families");
            } else {
                A[comp.time_id] = a;
            }
            solved_depth[family] = j;
        }
    };
    process_family(1);
    process_family(2);

    // closedness of the solved derivative data
    for (const auto& [u, au] : A)
        for (const auto& [v, av] : A) {
            if (u >= v) continue;
            Coeff d = au.diff_time(v) - av.diff_time(u);
            if (!time_degree_upto(d, cap - 2).is_zero())
                throw IncompatibleData("derivative data is not closed");
        }

    // path integral in registration order
    Coeff ft = Coeff::zero(ctx);
    for (const auto& [u, au] : A) {
        Coeff term = au;
        for (const auto& [v, av] : A) {
            (void)av;
            if (v > u) term = term.subst_time_zero(v);
        }
        ft = ft + term.integrate_time(u);
    }

    // zeta^0 sector of the family-2 equation: F(x - eps) - F = [log P_2']_0
    Coeff g20 = g2.at(0);
    Coeff lhs_t = ft.shift_x(-1) - ft;
    Coeff g20_t = g20 - g20.keep_time_free();
    if (!(time_degree_upto(lhs_t - g20_t, cap - 1).is_zero()))
        throw IncompatibleData("x-shift sector does not match the time part");
    Coeff f0 = solve_shift_eq(ctx, -g20.keep_time_free(), Scalar::one(ctx), -1);

    TauData tau{ctx, f0 + ft, 0};

    // round trip: the rebuilt symbol logarithms must reproduce the dressing
    // data through the solved coupling depths, through time degree cap - 1
    // (the slice determined by degree-capped data), and up to an x- and
    // time-free constant per depth (the residual dressing gauge).
    for (int family = 1; family <= 2; ++family) {
        int d = solved_depth[family];
        ShiftVector s = shift_vector(ctx, family, 0);
        ZC predicted = apply_shift(ctx, tau.F, s, d);
        predicted.add_at(0, -tau.F);
        ZC diff = (family == 1 ? g1 : g2) - predicted;
        for (const auto& [dg, c] : diff.coeffs()) {
            if (dg < -d) continue;
            Coeff ct = time_degree_upto(c, cap - 1);
            Coeff cc = ct.keep_time_free();
            if (!(ct - cc).is_zero() || !cc.dx().is_zero())
                throw IncompatibleData("reconstructed tau does not reproduce the dressing");
        }
    }
    return tau;
}

} // namespace ebt
