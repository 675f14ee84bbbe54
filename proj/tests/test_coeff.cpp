#include <catch2/catch_amalgamated.hpp>

#include "ebt/dop.hpp"

using namespace ebt;

namespace {
HierarchyParams base_params() {
    HierarchyParams p;
    p.k = 1;
    p.m = 1;
    p.eps_lo = -8;
    p.eps_hi = 8;
    p.x_cap = 8;
    p.time_order = 3;
    return p;
}
} // namespace

TEST_CASE("coeff ring basics") {
    Context ctx(base_params());
    Coeff one = Coeff::one(&ctx);
    Coeff x = Coeff::x_pow(&ctx, 1, Scalar::one(&ctx));
    Coeff eps = Coeff::eps_pow(&ctx, 1, Scalar::one(&ctx));

    CHECK((x + x) == x.scale_rat(2));
    CHECK((x * x - x * x).is_zero());
    CHECK(x * eps == eps * x);
    CHECK((one - one).is_zero());

    // shift then unshift
    Coeff p = x * x + x.scale_rat(Rat(1, 3)) + one;
    CHECK(p.shift_x(2).shift_x(-2) == p);
    // (x+eps)^2 = x^2 + 2 eps x + eps^2
    Coeff sq = (x * x).shift_x(1);
    Coeff expect = x * x + (x * eps).scale_rat(2) + eps * eps;
    CHECK(sq == expect);
}

TEST_CASE("exponential generators under shift and derivative") {
    Context ctx(base_params());
    int g = ctx.register_exp_symbol("g");
    int lg = ctx.log_sym(g);
    Mono e;
    e[g] = 1;
    Coeff G = Coeff::exp_gen(&ctx, e); // g^(x/eps)

    // shift_x by 1: g^(x/eps + 1) = g * g^(x/eps)
    CHECK(G.shift_x(1) == G.scale(Scalar::sym(&ctx, g)));
    CHECK(G.shift_x(-3) == G.scale(Scalar::sym(&ctx, g, -3)));

    // eps d/dx g^(x/eps) = log(g) g^(x/eps)
    CHECK(G.eps_dx() == G.scale(Scalar::sym(&ctx, lg)));

    // mixed: eps d/dx (x g^(x/eps)) = eps g^(x/eps) + x log(g) g^(x/eps)
    Coeff x = Coeff::x_pow(&ctx, 1, Scalar::one(&ctx));
    Coeff lhs = (x * G).eps_dx();
    Coeff rhs = G.mul_eps(1) + (x * G).scale(Scalar::sym(&ctx, lg));
    CHECK(lhs == rhs);
}

TEST_CASE("window overflow") {
    HierarchyParams p = base_params();
    p.eps_lo = -1;
    p.eps_hi = 1;
    p.x_cap = 2;
    Context ctx(p);
    Coeff x = Coeff::x_pow(&ctx, 1, Scalar::one(&ctx));
    CHECK_THROWS_AS(x * x * x, WindowOverflow);
    Coeff ei = Coeff::eps_pow(&ctx, -1, Scalar::one(&ctx));
    CHECK_THROWS_AS(ei * ei, WindowOverflow);
}

TEST_CASE("time truncation and calculus") {
    Context ctx(base_params());
    int t1 = ctx.register_time({2, 0, 0});
    int t2 = ctx.register_time({2, 1, 0});
    Coeff q1 = Coeff::time(&ctx, t1, Scalar::one(&ctx));
    Coeff q2 = Coeff::time(&ctx, t2, Scalar::one(&ctx));

    CHECK(q1.diff_time(t1) == Coeff::one(&ctx));
    CHECK(q1.diff_time(t2).is_zero());
    CHECK(Coeff::one(&ctx).integrate_time(t1) == q1);
    CHECK((q1 * q1).diff_time(t1) == q1.scale_rat(2));
    CHECK(q1.integrate_time(t1) == (q1 * q1).scale_rat(Rat(1, 2)));

    // cap: time_order = 3, so q1^4 dies silently
    Coeff q1sq = q1 * q1;
    CHECK((q1sq * q1sq).is_zero());
    CHECK(!(q1sq * q1).is_zero());

    // substitution
    CHECK((q1 * q2 + q2).subst_time_zero(t1) == q2);
    CHECK((q1 + Coeff::one(&ctx)).keep_time_free() == Coeff::one(&ctx));
    CHECK((q1 * q2).time_degree_part(2) == q1 * q2);
    CHECK((q1 * q2).time_degree_part(1).is_zero());
}

TEST_CASE("unit inversion") {
    Context ctx(base_params());
    int g = ctx.register_exp_symbol("g");
    int t1 = ctx.register_time({2, 0, 0});
    Mono e;
    e[g] = -1;
    Coeff u = Coeff::exp_gen(&ctx, e); // g^(-x/eps), a unit
    Coeff x = Coeff::x_pow(&ctx, 1, Scalar::one(&ctx));
    Coeff q = Coeff::time(&ctx, t1, Scalar::one(&ctx));

    Coeff c = u + x * q + q * q.scale_rat(Rat(5, 7));
    Coeff ci = c.invert_unit();
    CHECK(c * ci == Coeff::one(&ctx));

    // pure scalar unit
    Coeff s = Coeff::from_rat(&ctx, Rat(3, 4));
    CHECK(s.invert_unit() == Coeff::from_rat(&ctx, Rat(4, 3)));

    // x-dependent time-free part is not a unit
    CHECK_THROWS_AS((u + x).invert_unit(), NonUnitLeading);
    CHECK_THROWS_AS(Coeff::zero(&ctx).invert_unit(), NonUnitLeading);
}

TEST_CASE("log and exp round trips") {
    Context ctx(base_params());
    int g = ctx.register_exp_symbol("g");
    int t1 = ctx.register_time({2, 0, 0});
    Mono e;
    e[g] = -1;
    Coeff u = Coeff::exp_gen(&ctx, e);
    Coeff q = Coeff::time(&ctx, t1, Scalar::one(&ctx));

    Coeff c = u + q.scale(Scalar::sym(&ctx, g)) + (q * q).scale_rat(Rat(1, 2));
    Coeff lg = c.log_unit();
    CHECK(lg.exp_quasi() == c);

    // log(g^(-x/eps)) = -(x/eps) log g
    Coeff pure = u.log_unit();
    CKey key;
    key.a = 1;
    key.b = -1;
    CHECK(pure == Coeff::term(&ctx, key, -Scalar::sym(&ctx, ctx.log_sym(g))));

    // exp(log g * (x/eps + 2)) = g^(x/eps) g^2
    Coeff arg = Coeff::term(&ctx, key, Scalar::sym(&ctx, ctx.log_sym(g))) +
                Coeff::from_scalar(&ctx, Scalar::sym(&ctx, ctx.log_sym(g)).scale_by(2));
    Mono epos;
    epos[g] = 1;
    CHECK(arg.exp_quasi() == Coeff::exp_gen(&ctx, epos).scale(Scalar::sym(&ctx, g, 2)));

    // exp(q) = 1 + q + q^2/2 + q^3/6 (truncated at T=3)
    Coeff eq = q.exp_quasi();
    Coeff expect = Coeff::one(&ctx) + q + (q * q).scale_rat(Rat(1, 2)) +
                   (q * q * q).scale_rat(Rat(1, 6));
    CHECK(eq == expect);
}

TEST_CASE("D-operator composition") {
    Context ctx(base_params());
    Coeff x = Coeff::x_pow(&ctx, 1, Scalar::one(&ctx));
    DOp D = DOp::d(&ctx);
    DOp X = DOp::from_coeff(x);

    // [D, x] = eps
    DOp comm = D * X - X * D;
    CHECK(comm == DOp::from_coeff(Coeff::eps_pow(&ctx, 1, Scalar::one(&ctx))));

    // D^2 x^2 = x^2 D^2 + 4 eps x D + 2 eps^2
    DOp lhs = D * D * (X * X);
    Coeff eps = Coeff::eps_pow(&ctx, 1, Scalar::one(&ctx));
    DOp rhs = (X * X) * D * D + DOp::from_coeff((eps * x).scale_rat(4), 1) +
              DOp::from_coeff((eps * eps).scale_rat(2));
    CHECK(lhs == rhs);

    // Leibniz on exponential coefficient
    int g = ctx.register_exp_symbol("g");
    Mono e;
    e[g] = 1;
    DOp G = DOp::from_coeff(Coeff::exp_gen(&ctx, e));
    DOp dg = D * G - G * D;
    CHECK(dg == G.scale(Scalar::sym(&ctx, ctx.log_sym(g))));
}
