#pragma once

#include "ebt/diffop.hpp"

namespace ebt {

// Solve the first-order difference equation
//     p(x) - gamma * p(x + s*eps) = r(x)
// for a quasi-polynomial p (terms x^a eps^b E(e) with time monomials riding
// along). The equation decouples over sectors (e, t, a+b): within a sector
// the shift multiplies the exponential factor by Gamma_e(s) = prod g^{e_g s},
// so the effective scalar is mu = gamma * Gamma_e(s). For mu != 1 the sector
// solves by descending x-degree; for mu = 1 the solution is an antidifference
// of degree one higher, with the free additive constant fixed to zero.
inline Coeff solve_shift_eq(const Context* ctx, const Coeff& r, const Scalar& gamma, int s) {
    struct SectKey {
        Mono e;
        TMono t;
        int w = 0;
        bool operator<(const SectKey& o) const {
            if (e != o.e) return e < o.e;
            if (t != o.t) return t < o.t;
            return w < o.w;
        }
    };
    std::map<SectKey, std::map<int, Scalar>> sect;
    for (const auto& [key, val] : r.terms())
        sect[{key.e, key.t, key.a + key.b}][key.a] = val;

    Coeff p = Coeff::zero(ctx);
    Scalar one = Scalar::one(ctx);
    for (const auto& [sk, rs] : sect) {
        Scalar mu = gamma * Scalar::monomial(ctx, mono_pow(sk.e, s), ctx->ring().one());
        int deg = rs.rbegin()->first;
        std::map<int, Scalar> ps;
        if (mu == one) {
            if (s == 0) throw IncompatibleData("difference equation 0 = r with r != 0");
            // antidifference: x^a equation fixes the degree-(a+1) coefficient
            for (int a = deg; a >= 0; --a) {
                Scalar acc = Scalar::zero(ctx);
                auto it = rs.find(a);
                if (it != rs.end()) acc = it->second;
                for (int ap = a + 2; ap <= deg + 1; ++ap) {
                    auto jt = ps.find(ap);
                    if (jt == ps.end()) continue;
                    Rat f = Rat(binomial(ap, a)) * rat_pow(Rat(s), ap - a);
                    acc = acc + jt->second.scale_by(f);
                }
                Scalar v = (-acc).scale_by(Rat(1) / (Rat(a + 1) * Rat(s)));
                if (!v.is_zero()) ps[a + 1] = v;
            }
        } else {
            Scalar inv1m = (one - mu).inv();
            for (int a = deg; a >= 0; --a) {
                Scalar acc = Scalar::zero(ctx);
                auto it = rs.find(a);
                if (it != rs.end()) acc = it->second;
                Scalar tail = Scalar::zero(ctx);
                for (int ap = a + 1; ap <= deg; ++ap) {
                    auto jt = ps.find(ap);
                    if (jt == ps.end()) continue;
                    Rat f = Rat(binomial(ap, a)) * rat_pow(Rat(s), ap - a);
                    tail = tail + jt->second.scale_by(f);
                }
                Scalar v = inv1m * (acc + mu * tail);
                if (!v.is_zero()) ps[a] = v;
            }
        }
        for (const auto& [a, v] : ps) {
            CKey key;
            key.a = a;
            key.b = sk.w - a;
            key.e = sk.e;
            key.t = sk.t;
            p = p + Coeff::term(ctx, key, v);
        }
    }
    return p;
}

// A Lax operator is a fully known band operator on [-k, m] with D-free
// coefficients and leading coefficient 1 at Lambda^{-k}.
inline void validate_lax(const DiffOp& l) {
    const Context* ctx = l.ctx();
    int k = ctx->k(), m = ctx->m();
    if (!l.fully_known()) throw BandViolation("Lax operator must be fully known");
    if (!l.is_d_free_known()) throw BandViolation("Lax coefficients must be D-free");
    win::Iv s = l.supp();
    if (s.empty() || s.lo < -k || s.hi > m)
        throw BandViolation("Lax support must lie in [-k, m]");
    if (!(l.at(-k) == DOp::one(ctx)))
        throw BandViolation("Lax coefficient at Lambda^{-k} must be 1");
}

// Both dressings of a Lax operator, with cached inverses; all four series
// are computed through `depth` coefficients.
struct DressingPair {
    const Context* ctx = nullptr;
    DiffOp L;
    DiffOp P1, P1i; // P1 = 1 + p_1 Lambda + ..., P1 Lambda^{-k} P1^{-1} = L
    DiffOp P2, P2i; // P2 = p_0 + p_{-1} Lambda^{-1} + ..., P2 (Q Lambda)^m P2^{-1} = L
    int depth = 0;
    Scalar Q;    // the symbol Q, or 1 in numeric mode
    Coeff logQ;  // log Q, or 0 in numeric mode
};

inline DressingPair dress(const DiffOp& l, int depth) {
    validate_lax(l);
    const Context* ctx = l.ctx();
    int k = ctx->k(), m = ctx->m();

    DressingPair dp;
    dp.ctx = ctx;
    dp.L = l;
    dp.depth = depth;
    dp.Q = ctx->q_symbolic() ? Scalar::sym(ctx, ctx->q_sym()) : Scalar::one(ctx);
    dp.logQ = ctx->q_symbolic()
                  ? Coeff::from_scalar(ctx, Scalar::sym(ctx, ctx->logq_sym()))
                  : Coeff::zero(ctx);

    auto ucoef = [&](int s) { return l.at(s).scalar_part(); };

    // P1: p_i(x) - p_i(x - k eps) = sum_{s > -k} u_s(x) p_{i-k-s}(x + s eps)
    std::map<int, Coeff> p1;
    p1[0] = Coeff::one(ctx);
    for (int i = 1; i <= depth; ++i) {
        Coeff rhs = Coeff::zero(ctx);
        for (const auto& [s, us] : l.coeffs()) {
            if (s <= -k) continue;
            int j = i - k - s;
            if (j < 0) continue;
            rhs = rhs + us.scalar_part() * p1[j].shift_x(s);
        }
        p1[i] = solve_shift_eq(ctx, rhs, Scalar::one(ctx), -k);
    }

    // P2 leading coefficient: Q^m p_0(x) = u_m p_0(x + m eps). Requires
    // gamma = u_m Q^{-m} to be an exponential monomial with rational
    // coefficient 1 and exponents divisible by m; then p_0 = E(-j/m) for
    // gamma = prod g^{j_g}.
    Coeff um = ucoef(m);
    Mono gmono;
    {
        const auto& ts = um.terms();
        if (ts.size() != 1) throw NonUnitLeading("u_m must be a single monomial");
        const auto& [key, val] = *ts.begin();
        if (key.a != 0 || key.b != 0 || !key.e.empty() || !key.t.empty())
            throw NonUnitLeading("u_m must be constant in x, eps and times");
        auto mono = val.as_monomial();
        if (!mono || !(mono->second == ctx->ring().one()))
            throw NonUnitLeading("u_m must have coefficient 1");
        gmono = mono->first;
    }
    if (ctx->q_symbolic()) {
        gmono[ctx->q_sym()] -= m;
        if (gmono[ctx->q_sym()] == 0) gmono.erase(ctx->q_sym());
    }
    Mono e0;
    for (const auto& [g, j] : gmono) {
        if (j % m != 0)
            throw NonUnitLeading("u_m exponents must be divisible by m");
        if (j != 0) e0[g] = -j / m;
    }
    Scalar gamma = Scalar::monomial(ctx, gmono, ctx->ring().one());
    Scalar qmm = dp.Q.pow_int(-m);

    std::map<int, Coeff> p2;
    p2[0] = Coeff::exp_gen(ctx, e0);
    for (int j = -1; j >= -depth; --j) {
        Coeff rhs = Coeff::zero(ctx);
        for (const auto& [s, us] : l.coeffs()) {
            if (s >= m) continue;
            int jj = j + m - s;
            if (jj > 0) continue;
            rhs = rhs + us.scalar_part() * p2[jj].shift_x(s);
        }
        p2[j] = solve_shift_eq(ctx, rhs.scale(qmm), gamma, m);
    }

    std::map<int, DOp> m1, m2;
    for (const auto& [i, c] : p1)
        if (!c.is_zero()) m1[i] = DOp::from_coeff(c);
    for (const auto& [j, c] : p2)
        if (!c.is_zero()) m2[j] = DOp::from_coeff(c);
    dp.P1 = DiffOp::series(ctx, m1, win::Iv::of(0, win::POS), win::Iv::of(win::NEG, depth));
    dp.P2 = DiffOp::series(ctx, m2, win::Iv::of(win::NEG, 0), win::Iv::of(-depth, win::POS));
    dp.P1i = dp.P1.invert_up(depth);
    dp.P2i = dp.P2.invert_down(depth);
    return dp;
}

// Recomposition of L from either dressing (diagnostic).
inline DiffOp conj_k(const DressingPair& dp) {
    return dp.P1 * DiffOp::lambda_pow(dp.ctx, -dp.ctx->k()) * dp.P1i;
}
inline DiffOp conj_m(const DressingPair& dp) {
    int m = dp.ctx->m();
    return (dp.P2 * DiffOp::lambda_pow(dp.ctx, m) * dp.P2i).scale(dp.Q.pow_int(m));
}

enum class RootSide { k_side, m_side };

// L^{1/k} = P1 Lambda^{-1} P1^{-1},  L^{1/m} = P2 (Q Lambda) P2^{-1}.
inline DiffOp root(const DressingPair& dp, RootSide side) {
    if (side == RootSide::k_side)
        return dp.P1 * DiffOp::lambda_pow(dp.ctx, -1) * dp.P1i;
    return (dp.P2 * DiffOp::lambda_pow(dp.ctx, 1) * dp.P2i).scale(dp.Q);
}

// Fractional powers through the dressings:
//   L^{j/k} realized as P1 Lambda^{-j} P1^{-1}
//   L^{j/m} realized as Q^j P2 Lambda^{j} P2^{-1}
inline DiffOp frac_power_k(const DressingPair& dp, int j) {
    return dp.P1 * DiffOp::lambda_pow(dp.ctx, -j) * dp.P1i;
}
inline DiffOp frac_power_m(const DressingPair& dp, int j) {
    return (dp.P2 * DiffOp::lambda_pow(dp.ctx, j) * dp.P2i).scale(dp.Q.pow_int(j));
}

// Coefficient-wise derivative eps * d/dx (the coefficients must be D-free).
inline DiffOp deriv_x(const DiffOp& a) {
    std::map<int, DOp> m;
    for (const auto& [d, v] : a.coeffs()) {
        if (!v.is_d_free()) throw Error("deriv_x needs D-free coefficients");
        Coeff c = v.scalar_part().eps_dx();
        if (!c.is_zero()) m[d] = DOp::from_coeff(c);
    }
    return DiffOp::series(a.ctx(), m, a.supp(), a.window());
}

struct LogParts {
    DiffOp log_minus; // -k P1 D P1^{-1}
    DiffOp log_plus;  //  m P2 D P2^{-1} + m log Q
    DiffOp log_full;  // (1/2m) log_plus + (1/2k) log_minus, D-free
};

inline LogParts log_parts(const DressingPair& dp) {
    const Context* ctx = dp.ctx;
    int k = ctx->k(), m = ctx->m();
    DiffOp dform = DiffOp::from_map(ctx, {{0, DOp::d(ctx)}});
    DiffOp t1 = deriv_x(dp.P1) * dp.P1i; // (D P1) P1^{-1}
    DiffOp t2 = deriv_x(dp.P2) * dp.P2i; // (D P2) P2^{-1}
    LogParts lp;
    // P D P^{-1} = D - (D P) P^{-1}
    lp.log_minus = (dform - t1).scale_rat(Rat(-k));
    lp.log_plus = (dform - t2).scale_rat(Rat(m)) +
                  DiffOp::from_map(ctx, {{0, DOp::from_coeff(dp.logQ.scale_rat(Rat(m)))}});
    lp.log_full = (t1 - t2).scale_rat(Rat(1, 2)) +
                  DiffOp::from_map(ctx, {{0, DOp::from_coeff(dp.logQ.scale_rat(Rat(1, 2)))}});
    return lp;
}

} // namespace ebt
