#include <catch2/catch_amalgamated.hpp>

#include "ebt/random.hpp"

using namespace ebt;

namespace {

HierarchyParams wide_params() {
    HierarchyParams par;
    par.k = 2;
    par.m = 1;
    par.eps_lo = -30;
    par.eps_hi = 40;
    par.x_cap = 40;
    return par;
}

} // namespace

TEST_CASE("residue duality: res_zeta sigma_l(A) sigma_r(B) dzeta/zeta = res_Lambda(AB)") {
    HierarchyParams par = wide_params();
    Context ctx(par);
    Rng rng(20260817u);
    for (int trial = 0; trial < 60; ++trial) {
        DiffOp a = rng.band_op(&ctx, rng.uniform(-5, -1), rng.uniform(0, 5), 3, -2, 4);
        DiffOp b = rng.band_op(&ctx, rng.uniform(-5, -1), rng.uniform(0, 5), 3, -2, 4);
        DOp lhs = res_zeta(symbol_left(a) * symbol_right(b));
        DOp rhs = (a * b).res_lambda();
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("residue duality holds for D-carrying coefficients") {
    Context ctx(wide_params());
    Rng rng(7u);
    for (int trial = 0; trial < 12; ++trial) {
        std::map<int, DOp> ma, mb;
        for (int d = -2; d <= 2; ++d) {
            ma[d] = DOp::from_coeff(rng.coeff(&ctx, 2, -1, 2), rng.uniform(0, 2));
            mb[d] = DOp::from_coeff(rng.coeff(&ctx, 2, -1, 2), rng.uniform(0, 2));
        }
        DiffOp a = DiffOp::from_map(&ctx, ma);
        DiffOp b = DiffOp::from_map(&ctx, mb);
        DOp lhs = res_zeta(symbol_left(a) * symbol_right(b));
        DOp rhs = (a * b).res_lambda();
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("composition is associative and shift-consistent") {
    Context ctx(wide_params());
    Rng rng(99u);
    for (int trial = 0; trial < 10; ++trial) {
        DiffOp a = rng.band_op(&ctx, -2, 2, 2, 0, 2);
        DiffOp b = rng.band_op(&ctx, -2, 2, 2, 0, 2);
        DiffOp c = rng.band_op(&ctx, -2, 2, 2, 0, 2);
        REQUIRE(((a * b) * c).equal_on(a * (b * c), -8, 8));
    }
    // Lambda f = f(x+eps) Lambda
    Coeff f = Coeff::x_pow(&ctx, 2, Scalar::from_rat(&ctx, Rat(1)));
    DiffOp lf = DiffOp::lambda_pow(&ctx, 1) * DiffOp::from_map(&ctx, {{0, DOp::from_coeff(f)}});
    DiffOp fl = DiffOp::from_map(&ctx, {{0, DOp::from_coeff(f.shift_x(1))}}) *
                DiffOp::lambda_pow(&ctx, 1);
    REQUIRE(lf.equal_on(fl, 0, 2));
    // conjugation by Lambda^j shifts coefficients
    DiffOp a = rng.band_op(&ctx, -1, 3, 2, 0, 2);
    DiffOp conj = DiffOp::lambda_pow(&ctx, 2) * a * DiffOp::lambda_pow(&ctx, -2);
    REQUIRE(conj.equal_on(a.conj_shift(2), -1, 3));
    REQUIRE(a.lmul_lambda(2).equal_on(DiffOp::lambda_pow(&ctx, 2) * a, 1, 5));
    REQUIRE(a.rmul_lambda(2).equal_on(a * DiffOp::lambda_pow(&ctx, 2), 1, 5));
}

TEST_CASE("window bookkeeping through composition") {
    Context ctx(wide_params());
    // series known only on degrees [0, 3], support [0, +inf)
    std::map<int, DOp> m;
    for (int d = 0; d <= 3; ++d)
        m[d] = DOp::from_coeff(Coeff::from_rat(&ctx, Rat(d + 1)));
    DiffOp s = DiffOp::series(&ctx, m, win::Iv::of(0, win::POS), win::Iv::of(0, 3));

    REQUIRE(s.known(-5));         // below support: known zero
    REQUIRE(s.at(-5).is_zero());
    REQUIRE(s.known(2));
    REQUIRE_FALSE(s.known(4));    // inside support, beyond window
    REQUIRE_THROWS_AS(s.at(4), WindowMiss);

    // window folds to -inf over the known-zero margin
    REQUIRE(s.window().lo == win::NEG);
    REQUIRE(s.window().hi == 3);

    // product with an exact band shifts the reliable range
    DiffOp band = DiffOp::from_map(
        &ctx, {{-1, DOp::one(&ctx)}, {2, DOp::from_coeff(Coeff::from_rat(&ctx, Rat(1, 2)))}});
    DiffOp p = s * band;
    // band support [-1,2]: degree d of p needs s-coefficients up to d+1,
    // so p is reliable through degree 3 - 1 = 2
    REQUIRE(p.known(2));
    REQUIRE_FALSE(p.known(3));
    REQUIRE(p.window().hi == 2);
    REQUIRE(p.known(-10));

    // sums intersect windows
    DiffOp q = s + band;
    REQUIRE(q.window().hi == 3);
    REQUIRE_FALSE(q.known(4));

    // projections keep the window but clamp support
    DiffOp pos = s.project_pos();
    REQUIRE(pos.at(0).is_zero());
    REQUIRE(pos.known(1));
    REQUIRE_FALSE(pos.known(4));
    DiffOp np = s.project_nonpos();
    REQUIRE(np.fully_known());
    REQUIRE(np.at(0) == DOp::from_coeff(Coeff::from_rat(&ctx, Rat(1))));
}

TEST_CASE("upward inverse: (1 + positive part)^{-1}") {
    Context ctx(wide_params());
    Rng rng(5u);
    for (int trial = 0; trial < 8; ++trial) {
        std::map<int, DOp> m;
        m[0] = DOp::one(&ctx);
        for (int d = 1; d <= 3; ++d) {
            Coeff c = rng.coeff(&ctx, 2, -1, 2, 2);
            if (!c.is_zero()) m[d] = DOp::from_coeff(c);
        }
        DiffOp a = DiffOp::from_map(&ctx, m);
        DiffOp inv = a.invert_up(7);
        REQUIRE((a * inv).equal_on(DiffOp::identity(&ctx), -1, 7));
        REQUIRE((inv * a).equal_on(DiffOp::identity(&ctx), -1, 7));
        REQUIRE_FALSE((a * inv).known(8));
    }
    DiffOp bad = DiffOp::from_map(
        &ctx, {{0, DOp::from_coeff(Coeff::from_rat(&ctx, Rat(2)))}, {1, DOp::one(&ctx)}});
    REQUIRE_THROWS_AS(bad.invert_up(3), NonUnitLeading);
}

TEST_CASE("downward inverse: unit leading coefficient at Lambda^0") {
    HierarchyParams par = wide_params();
    Context ctx(par);
    int g = ctx.register_exp_symbol("g");
    Rng rng(11u);
    for (int trial = 0; trial < 6; ++trial) {
        std::map<int, DOp> m;
        // leading unit: g^2 * 3/2 (exp-monomial times rational)
        Mono e;
        e[g] = 2;
        m[0] = DOp::from_coeff(Coeff::exp_gen(&ctx, e).scale_rat(Rat(3, 2)));
        for (int d = -3; d <= -1; ++d) {
            Coeff c = rng.coeff(&ctx, 2, -1, 2, 2);
            if (!c.is_zero()) m[d] = DOp::from_coeff(c);
        }
        DiffOp a = DiffOp::from_map(&ctx, m);
        DiffOp inv = a.invert_down(7);
        REQUIRE((a * inv).equal_on(DiffOp::identity(&ctx), -7, 1));
        REQUIRE((inv * a).equal_on(DiffOp::identity(&ctx), -7, 1));
    }
    DiffOp bad = DiffOp::from_map(
        &ctx,
        {{0, DOp::from_coeff(Coeff::x_pow(&ctx, 1, Scalar::from_rat(&ctx, Rat(1))))},
         {-1, DOp::one(&ctx)}});
    REQUIRE_THROWS_AS(bad.invert_down(3), NonUnitLeading);
}

TEST_CASE("zeta series transforms") {
    Context ctx(wide_params());
    Rng rng(3u);
    DiffOp a = rng.band_op(&ctx, -3, 2, 2, 0, 1);
    ZetaSeries s = symbol_left(a);
    REQUIRE(s.zeta_inverse().zeta_inverse() == s);
    // scaling zeta by a symbol multiplies degree-d coefficients by q^d
    Context ctxq = [] {
        HierarchyParams p = wide_params();
        p.q_symbolic = true;
        return Context(p);
    }();
    DiffOp b = DiffOp::from_map(
        &ctxq, {{-2, DOp::one(&ctxq)}, {1, DOp::from_coeff(Coeff::from_rat(&ctxq, Rat(5)))}});
    Scalar q = Scalar::sym(&ctxq, ctxq.q_sym());
    ZetaSeries t = symbol_left(b).scale_zeta(q);
    REQUIRE(t.at(-2) == DOp::one(&ctxq).scale(q.pow_int(-2)));
    REQUIRE(t.at(1) == DOp::from_coeff(Coeff::from_rat(&ctxq, Rat(5))).scale(q));
    // res over zeta of f dzeta/zeta picks the zeta^0 term
    REQUIRE(res_zeta(symbol_left(b)).is_zero());
    REQUIRE(res_zeta(symbol_left(b).mul_zeta_pow(2)) == DOp::one(&ctxq));
}
