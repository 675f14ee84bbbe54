#include <catch2/catch_amalgamated.hpp>

#include "ebt/scalar.hpp"

using namespace ebt;

namespace {
HierarchyParams params23() {
    HierarchyParams p;
    p.k = 2;
    p.m = 3;
    p.q_symbolic = true;
    return p;
}
} // namespace

TEST_CASE("context registration") {
    Context ctx(params23());
    CHECK(ctx.N() == 6);
    int g = ctx.register_exp_symbol("g");
    CHECK(ctx.symbol("g") == g);
    CHECK(ctx.log_sym(g) >= 0);
    CHECK(ctx.symbol_name(ctx.log_sym(g)) == "log[g]");
    CHECK(ctx.q_sym() >= 0);
    CHECK(ctx.logq_sym() >= 0);
    // idempotent
    CHECK(ctx.register_exp_symbol("g") == g);

    int t = ctx.register_time({2, 1, 0});
    CHECK(ctx.time_id({2, 1, 0}) == t);
    CHECK(ctx.register_time({2, 1, 0}) == t);
    CHECK_THROWS_AS(ctx.register_time({2, 0, 0}), ConfigError); // q_0^k is x
    CHECK_THROWS_AS(ctx.register_time({6, 0, 0}), ConfigError); // beta > k+m
}

TEST_CASE("scalar field arithmetic") {
    Context ctx(params23());
    int g = ctx.register_exp_symbol("g");
    auto R = [&](long n, long d = 1) { return Scalar::from_rat(&ctx, Rat(n, d)); };
    Scalar G = Scalar::sym(&ctx, g);

    CHECK(R(2) + R(3) == R(5));
    CHECK(R(2, 3) * R(3, 2) == R(1));
    CHECK((G * G) * G.inv() == G);
    CHECK((R(1) - G) + G == R(1));
    CHECK((R(1) / (R(1) - G)) * (R(1) - G) == R(1));

    // cross-multiplied equality on distinct representations
    Scalar a = (R(1) - G * G) / (R(1) - G); // = 1 + g after cancellation (not performed)
    Scalar b = R(1) + G;
    CHECK(a == b);
    CHECK(a - b == R(0));
    CHECK((a - b).is_zero());

    // monomial denominator cancels
    Scalar c = G.inv() * (R(1) + G);
    Scalar d = G.pow_int(-1) + R(1);
    CHECK(c == d);

    // powers
    CHECK(G.pow_int(3) * G.pow_int(-3) == R(1));
    CHECK(R(2).pow_int(10) == R(1024));
}

TEST_CASE("scalar with roots of unity") {
    HierarchyParams p;
    p.k = 2;
    p.m = 2;
    Context ctx(p); // N = 2, w = -1
    Scalar w = Scalar::from_cyc(&ctx, ctx.ring().root_pow(1));
    CHECK(w * w == Scalar::one(&ctx));
    CHECK(w == Scalar::from_rat(&ctx, -1));
}

TEST_CASE("as_monomial and as_rat") {
    Context ctx(params23());
    int g = ctx.register_exp_symbol("g");
    Scalar G = Scalar::sym(&ctx, g);
    Scalar v = Scalar::from_rat(&ctx, Rat(3, 4)) * G.pow_int(2);
    auto mo = v.as_monomial();
    REQUIRE(mo.has_value());
    CHECK(mo->first.at(g) == 2);
    CHECK(mo->second == ctx.ring().from_rat(Rat(3, 4)));
    CHECK(!v.as_rat().has_value());
    CHECK(*Scalar::from_rat(&ctx, Rat(7, 5)).as_rat() == Rat(7, 5));
    CHECK(!(Scalar::one(&ctx) + G).as_monomial().has_value());
    CHECK(*Scalar::zero(&ctx).as_rat() == 0);
}

TEST_CASE("scalar serialization is stable") {
    Context ctx(params23());
    int g = ctx.register_exp_symbol("g");
    Scalar G = Scalar::sym(&ctx, g);
    Scalar s = Scalar::from_rat(&ctx, Rat(1, 2)) + G;
    CHECK(s.str() == "1/2 + g");
    CHECK((Scalar::one(&ctx) / (Scalar::one(&ctx) - G)).str() == "(1)/(1 - g)");
    CHECK(Scalar::zero(&ctx).str() == "0");
}
