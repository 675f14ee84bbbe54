#include <catch2/catch_amalgamated.hpp>

#include "ebt/periods.hpp"

using namespace ebt;

namespace {

HierarchyParams roomy(int k, int m, int order = 1) {
    HierarchyParams par;
    par.k = k;
    par.m = m;
    par.q_symbolic = true;
    par.eps_lo = -40;
    par.eps_hi = 40;
    par.x_cap = 40;
    par.time_order = order;
    return par;
}

PeriodExpansion rat_term(const CycRing& R, const Rat& e, const Rat& a) {
    PeriodCell c = PeriodCell::zero(R);
    c.A = R.from_rat(a);
    return PeriodExpansion::term(e, c);
}

} // namespace

TEST_CASE("flat coordinates of small superpotentials") {
    // k=2, m=1: lambda = zeta^2 + u1 zeta + u2 + u3/zeta
    GenericFlat g21 = flat_generic(2, 1);
    REQUIRE(g21.t[1] == UPoly::var(3, 1));                        // t^1 = u1
    REQUIRE(g21.t[2] == UPoly::var(3, 2));                        // t^2 = u2

    // k=3, m=1: the first correction is quadratic, t^2 = u2 - u1^2/6
    GenericFlat g31 = flat_generic(3, 1);
    REQUIRE(g31.t[1] == UPoly::var(4, 1));
    UPoly expected = UPoly::var(4, 2) - (UPoly::var(4, 1) * UPoly::var(4, 1)).scale(Rat(1) / 6);
    REQUIRE(g31.t[2] == expected);
    REQUIRE(g31.t[3] == UPoly::var(4, 3)); // t^k = u_k from both residue families

    // k=1, m=2: the zero-puncture family brings in the root w of u3,
    // t^2 = u2 * w^{-1}
    GenericFlat g12 = flat_generic(1, 2);
    REQUIRE(g12.t[2] == UPoly::var(3, 2) * UPoly::wpow(3, -1));

    // concrete evaluation with an exact square root: u3 = 4 collapses w to 2
    FlatPoint fp = flat_coordinates(Superpotential::make(1, 2, {Rat(5), Rat(3), Rat(4)}));
    REQUIRE(fp.t[1] == std::map<int, Rat>{{0, Rat(5)}});
    REQUIRE(fp.t[2] == std::map<int, Rat>{{0, Rat(3) / 2}});
    REQUIRE(fp.log_qpow == 2);
    REQUIRE(fp.log_unit == 4);

    // without an exact root the w power stays symbolic: u2/w = (u2/u3) w
    FlatPoint fq = flat_coordinates(Superpotential::make(1, 2, {Rat(5), Rat(3), Rat(2)}));
    REQUIRE(fq.t[2] == std::map<int, Rat>{{1, Rat(3) / 2}});

    // vanishing middle coefficients kill every polynomial coordinate
    FlatPoint fv = flat_coordinates(Superpotential::make(3, 2, {0, 0, 0, 0, Rat(7)}));
    for (int alpha = 1; alpha <= 4; ++alpha) REQUIRE(fv.t[alpha].empty());

    REQUIRE_THROWS_AS(flat_coordinates(Superpotential::make(2, 1, {Rat(1), Rat(2), Rat(0)})),
                      NonUnitLeading);
}

TEST_CASE("flat coordinate perturbations match the differentiated residue") {
    // d t^alpha / d u_i computed two ways: as the polynomial derivative of the
    // residue expansion of lambda^{alpha/k}, and as the directly expanded
    // residue of lambda^{alpha/k - 1} zeta^{k-i} coming from the chain rule.
    using namespace perioddetail;
    for (auto [k, m] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{2, 3}}) {
        int nvars = k + m;
        GenericFlat gen = flat_generic(k, m);
        ZetaPoly g;
        for (int i = 1; i <= k + m - 1; ++i) zp_add(g, -i, UPoly::var(nvars, i));
        zp_add(g, -(k + m), UPoly::wpow(nvars, m));
        for (int alpha = 1; alpha <= k; ++alpha)
            for (int i = 1; i <= k + m - 1; ++i) {
                UPoly direct =
                    binomial_coefficient_of(g, Rat(alpha) / Rat(k) - 1, i - alpha, nvars);
                REQUIRE(gen.t[static_cast<std::size_t>(alpha)].deriv(i) == direct);
            }
        // zero-puncture family: d t^{k+m-beta} / d u_i =
        //   w^{beta-m} [zeta^{beta-m-k+i}] (1+h)^{beta/m - 1}
        ZetaPoly h;
        zp_add(h, k + m, UPoly::wpow(nvars, -m));
        for (int i = 1; i <= k + m - 1; ++i)
            zp_add(h, k + m - i, UPoly::var(nvars, i) * UPoly::wpow(nvars, -m));
        for (int beta = 1; beta <= m - 1; ++beta)
            for (int i = 1; i <= k + m - 1; ++i) {
                UPoly direct =
                    binomial_coefficient_of(h, Rat(beta) / Rat(m) - 1, beta - m - k + i, nvars) *
                    UPoly::wpow(nvars, beta - m);
                REQUIRE(gen.t[static_cast<std::size_t>(k + m - beta)].deriv(i) == direct);
            }
    }
}

TEST_CASE("metric and Euler data") {
    REQUIRE(metric_entry(2, 1, 1, 1) == Rat(1) / 2);  // 1+1 = k when k = 2
    REQUIRE(metric_entry(3, 1, 1, 1) == 0);           // off the antidiagonal
    REQUIRE(metric_entry(3, 1, 1, 2) == Rat(1) / 3);
    REQUIRE(metric_entry(2, 3, 2, 5) == Rat(1) / 3);  // <d_k, d_{k+m}> = 1/m
    REQUIRE(metric_entry(2, 3, 3, 4) == Rat(1) / 3);
    REQUIRE(metric_entry(2, 3, 1, 4) == 0);

    // every index pairs with exactly one partner: the Gram matrix is a
    // permutation of nonzero antidiagonal blocks
    for (auto [k, m] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{1, 1}}) {
        for (int i = 1; i <= k + m; ++i) {
            int nonzero = 0;
            for (int j = 1; j <= k + m; ++j) {
                Rat e = metric_entry(k, m, i, j);
                REQUIRE(e == metric_entry(k, m, j, i));
                if (e != 0) ++nonzero;
            }
            REQUIRE(nonzero == 1);
        }
    }

    REQUIRE(euler_coefficient(2, 3, 1) == Rat(1) / 2);
    REQUIRE(euler_coefficient(2, 3, 2) == 1);
    REQUIRE(euler_coefficient(2, 3, 4) == Rat(1) / 3);       // 1 - 2/3
    REQUIRE(euler_coefficient(2, 3, 5) == Rat(5) / 2);       // (1/2 + 1/3) * 3
    REQUIRE(euler_coefficient(3, 1, 4) == Rat(4) / 3);       // (1/3 + 1) * 1
    REQUIRE_THROWS_AS(euler_coefficient(2, 3, 6), ConfigError);
}

TEST_CASE("closed vertex components match the displayed coefficients") {
    PeriodRing pr(2, 3);
    const CycRing& R = pr.R;
    VertexVector v1 = vertex_vector_closed(pr, 1, 4);

    // dt^k coefficient at z^n is (1/k) n! lambda^{-n-1}; in the raised
    // alpha = k+m slot that reads (m/k)(-1)^n n! lambda^{-n-1}
    for (int n = 0; n <= 4; ++n) {
        Rat amp = Rat(3) / Rat(2) * Rat(factorial(n)) * (n % 2 ? -1 : 1);
        REQUIRE(v1.at(n, 5) == rat_term(R, Rat(-n - 1), amp));
    }
    // no d/dt^k component in the first family
    for (int n = -5; n <= 4; ++n) REQUIRE(v1.at(n, 2).is_zero());

    // second family: overall minus and 1/m in the dt^k tail
    VertexVector v4 = vertex_vector_closed(pr, 4, 4);
    for (int n = 0; n <= 4; ++n) {
        Rat amp = -Rat(factorial(n)) * (n % 2 ? -1 : 1);
        REQUIRE(v4.at(n, 5) == rat_term(R, Rat(-n - 1), amp));
    }
    // q_0^k slot survives with (0)_n = delta_{n,0}
    REQUIRE(v4.at(0, 2) == rat_term(R, Rat(0), Rat(-1)));
    for (int n = 1; n <= 4; ++n) REQUIRE(v4.at(n, 2).is_zero());

    // branch dependence: branches differ by root-of-unity twists on the
    // fractional powers and by a 2*pi*i shift of the logarithm
    VertexVector v2 = vertex_vector_closed(pr, 2, 4);
    for (int n = -5; n <= 4; ++n) {
        Cyc tw = pr.om_k(1 - (n + 1) * 2); // alpha = 1 string, w_k^{alpha-(n+1)k}
        REQUIRE(v2.at(n, 1) == v1.at(n, 1).scale_cyc(R, tw));
    }
    for (int n = 0; n <= 4; ++n) {
        const PeriodExpansion& lg1 = v1.at(-n - 1, 5);
        const PeriodExpansion& lg2 = v2.at(-n - 1, 5);
        REQUIRE(lg1.terms().size() == 1);
        REQUIRE(lg2.terms().size() == 1);
        const PeriodCell& c1 = lg1.terms().begin()->second;
        const PeriodCell& c2 = lg2.terms().begin()->second;
        REQUIRE(c2.B == c1.B);                      // same log lambda weight
        REQUIRE(c2.A == c1.A);                      // same harmonic part
        REQUIRE(R.sub(c2.C, c1.C) == c1.B);         // shifted by one 2*pi*i
    }

    // second-family branches shift the logarithm of lambda Q^{-m}
    VertexVector v5 = vertex_vector_closed(pr, 5, 4);
    for (int n = 0; n <= 4; ++n) {
        const PeriodCell& c4 = v4.at(-n - 1, 5).terms().begin()->second;
        const PeriodCell& c5 = v5.at(-n - 1, 5).terms().begin()->second;
        REQUIRE(c4.D == c5.D); // both carry -m log Q inside the branch log
        REQUIRE(R.sub(c5.C, c4.C) == c4.B);
    }
}

TEST_CASE("vertex ladder: termwise lambda derivative raises the index") {
    for (auto [k, m] : {std::pair{2, 1}, std::pair{2, 3}, std::pair{3, 3}}) {
        PeriodRing pr(k, m);
        for (int branch = 1; branch <= k + m; ++branch) {
            VertexVector v = vertex_vector_closed(pr, branch, 4);
            for (int n = -4; n <= 3; ++n)
                for (int alpha = 1; alpha <= k + m; ++alpha)
                    REQUIRE(v.at(n, alpha).dlam(pr.R) == v.at(n + 1, alpha));
        }
    }
}

TEST_CASE("periods: direct integration agrees with the closed forms") {
    // the two routes share no formulas: one evaluates Pochhammer closed
    // expressions, the other antidifferentiates the binomial expansion of the
    // integrand termwise; their equality rests on classical summation
    // identities, so it is a genuine cross-check of both
    for (auto [k, m] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 3},
                        std::pair{3, 2}, std::pair{3, 3}}) {
        PeriodRing pr(k, m);
        for (int branch = 1; branch <= k + m; ++branch) {
            VertexVector v = vertex_vector_closed(pr, branch, 4);
            for (int n = -4; n <= 4; ++n)
                for (int alpha = 1; alpha <= k + m; ++alpha) {
                    PeriodExpansion direct = period_classical(pr, branch, -n, alpha, 4);
                    PeriodExpansion closed = lower_component(pr, v, n, alpha);
                    INFO("k=" << k << " m=" << m << " branch=" << branch << " n=" << n
                              << " alpha=" << alpha);
                    REQUIRE(direct == closed);
                }
        }
    }
}

TEST_CASE("periods: derivative ladder within the integral route") {
    PeriodRing pr(3, 2);
    for (int branch = 1; branch <= 5; ++branch)
        for (int alpha = 1; alpha <= 5; ++alpha)
            for (int p = 4; p >= 2; --p) {
                PeriodExpansion high = period_classical(pr, branch, p, alpha, 6);
                PeriodExpansion low = period_classical(pr, branch, p - 1, alpha, 6);
                REQUIRE(high.dlam(pr.R) == low);
            }
}

TEST_CASE("period examples at p = 1") {
    PeriodRing pr(3, 2);
    const CycRing& R = pr.R;

    // branch a, alpha = k: (1/k) log_a lambda
    for (int a = 1; a <= 3; ++a) {
        PeriodExpansion got = period_classical(pr, a, 1, 3, 2);
        PeriodCell cell = PeriodCell::zero(R);
        cell.B = R.from_rat(Rat(1) / 3);
        cell.C = R.from_rat(Rat(a - 1) / 3);
        REQUIRE(got == PeriodExpansion::term(Rat(0), cell));
    }

    // branch a, alpha < k: lambda_a^{(k-alpha)/k} / (k-alpha)
    PeriodExpansion got = period_classical(pr, 2, 1, 1, 2);
    PeriodCell cell = PeriodCell::zero(R);
    cell.A = R.scale(pr.om_k(2), Rat(1) / 2); // twist w_3^{(a-1)(k-alpha)} = w_3^2
    REQUIRE(got == PeriodExpansion::term(Rat(2) / 3, cell));

    // components outside the branch family vanish
    REQUIRE(period_classical(pr, 1, 1, 4, 2).is_zero());
    REQUIRE(period_classical(pr, 4, 1, 2, 2).is_zero());

    // branch b, alpha = k picks up the shifted logarithm of lambda Q^{-m}
    PeriodExpansion gb = period_classical(pr, 5, 1, 3, 2);
    PeriodCell cb = PeriodCell::zero(R);
    cb.B = R.from_rat(Rat(-1) / 2);
    cb.C = R.from_rat(Rat(-1) / 2); // branch index bp = 1
    cb.D = R.from_rat(Rat(1));
    REQUIRE(gb == PeriodExpansion::term(Rat(0), cb));
}

TEST_CASE("quantized vertex coefficients reproduce the shift vectors") {
    for (auto [k, m] : {std::pair{2, 1}, std::pair{2, 3}}) {
        Context ctx(roomy(k, m));
        register_active_times(ctx, 4 * std::max(k, m) + std::max(k, m));
        ShiftConsistency rep = consistency_with_shifts(&ctx, 3);
        INFO("k=" << k << " m=" << m);
        for (const auto& s : rep.mismatches) INFO(s);
        REQUIRE(rep.ok);
        REQUIRE(rep.checked > 0);
        REQUIRE(rep.skipped == 0);
    }

    // with a sparse context the unmatchable components are reported skipped
    Context ctx(roomy(2, 1));
    register_active_times(ctx, 2);
    ShiftConsistency rep = consistency_with_shifts(&ctx, 3);
    REQUIRE(rep.ok);
    REQUIRE(rep.skipped > 0);
}
