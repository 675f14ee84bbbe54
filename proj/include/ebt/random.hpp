#pragma once

#include <random>

#include "ebt/diffop.hpp"

namespace ebt {

// Deterministic sample source for randomized suites. Values are drawn from
// the raw mt19937_64 stream (no distribution adapters) so a fixed seed yields
// identical cases on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform integer in [lo, hi]
    int uniform(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    bool chance(int num, int den) { return uniform(1, den) <= num; }

    Rat rat(int num_abs = 4, int den_max = 3) {
        int n = uniform(-num_abs, num_abs);
        int d = uniform(1, den_max);
        return Rat(n, d);
    }

    Rat rat_nonzero(int num_abs = 4, int den_max = 3) {
        for (;;) {
            Rat q = rat(num_abs, den_max);
            if (q != 0) return q;
        }
    }

    // Polynomial in x (degree <= xdeg) with eps powers in [elo, ehi].
    Coeff coeff(const Context* ctx, int xdeg, int elo, int ehi, int terms = 3) {
        Coeff r = Coeff::zero(ctx);
        for (int i = 0; i < terms; ++i) {
            Rat q = rat();
            if (q == 0) continue;
            int a = uniform(0, xdeg);
            int b = uniform(elo, ehi);
            CKey key;
            key.a = a;
            key.b = b;
            r = r + Coeff::term(ctx, key, Scalar::from_rat(ctx, q));
        }
        return r;
    }

    // Fully known operator supported on [lo, hi] with D-free coefficients.
    DiffOp band_op(const Context* ctx, int lo, int hi, int xdeg, int elo, int ehi) {
        std::map<int, DOp> m;
        for (int d = lo; d <= hi; ++d) {
            if (!chance(3, 4)) continue;
            Coeff c = coeff(ctx, xdeg, elo, ehi);
            if (!c.is_zero()) m[d] = DOp::from_coeff(c);
        }
        if (m.empty()) m[uniform(lo, hi)] = DOp::one(ctx);
        return DiffOp::from_map(ctx, m);
    }

    // Lax-shaped operator: band [-k, m], coefficient 1 at Lambda^{-k} and at
    // Lambda^m, random x-polynomial coefficients in between.
    DiffOp lax_op(const Context* ctx, int xdeg = 2, int elo = 0, int ehi = 2) {
        int k = ctx->k(), m = ctx->m();
        std::map<int, DOp> mm;
        mm[-k] = DOp::one(ctx);
        mm[m] = DOp::one(ctx);
        for (int d = -k + 1; d < m; ++d) {
            if (!chance(3, 4)) continue;
            Coeff c = coeff(ctx, xdeg, elo, ehi, 2);
            if (!c.is_zero()) mm[d] = DOp::from_coeff(c);
        }
        return DiffOp::from_map(ctx, mm);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace ebt
