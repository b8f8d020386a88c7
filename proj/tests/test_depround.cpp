#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "kmr/depround.hpp"

using namespace kmr;

namespace {

double weighted_sum(const std::vector<double>& a, const std::vector<double>& x) {
    return std::inner_product(a.begin(), a.end(), x.begin(), 0.0);
}

int fractional_count(const std::vector<double>& x) {
    int n = 0;
    for (double v : x) n += is_fractional(v);
    return n;
}

}  // namespace

TEST_CASE("simplify: case I puts all mass on gamma1 = 0 near the lower limit") {
    const SimplifyBranches sb = simplify_branches(1, 1, 1e-13, 0.4);
    CHECK(sb.which == SimplifyCase::I);
    double p_zero = 0;
    for (const auto& br : sb.branch)
        if (br.gamma1 == 0.0) p_zero += br.prob;
    CHECK(p_zero == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("simplify: case IV branch values for (1,2,0.6,0.9)") {
    const SimplifyBranches sb = simplify_branches(1, 2, 0.6, 0.9);
    CHECK(sb.which == SimplifyCase::IV);
    double e1 = 0, e2 = 0;
    bool saw_a = false, saw_b = false;
    for (const auto& br : sb.branch) {
        CHECK(br.gamma1 + 2 * br.gamma2 == doctest::Approx(2.4).epsilon(1e-12));
        e1 += br.prob * br.gamma1;
        e2 += br.prob * br.gamma2;
        if (std::fabs(br.gamma1 - 1) < 1e-12 && std::fabs(br.gamma2 - 0.7) < 1e-12) {
            saw_a = true;
            CHECK(br.prob == doctest::Approx(1.0 / 3));
        }
        if (std::fabs(br.gamma1 - 0.4) < 1e-12 && std::fabs(br.gamma2 - 1) < 1e-12) {
            saw_b = true;
            CHECK(br.prob == doctest::Approx(2.0 / 3));
        }
    }
    CHECK(saw_a);
    CHECK(saw_b);
    CHECK(e1 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(e2 == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("simplify: case II branch values for (1,3,0.5,0.5)") {
    const SimplifyBranches sb = simplify_branches(1, 3, 0.5, 0.5);
    CHECK(sb.which == SimplifyCase::II);
    for (const auto& br : sb.branch) {
        CHECK(br.prob == doctest::Approx(0.5));
        if (br.gamma1 == 1.0) CHECK(br.gamma2 == doctest::Approx(1.0 / 3));
        else CHECK(br.gamma2 == doctest::Approx(2.0 / 3));
    }
}

TEST_CASE("simplify: rejects out-of-range inputs") {
    CHECK_THROWS(simplify_branches(0, 1, 0.5, 0.5));
    CHECK_THROWS(simplify_branches(1, 1, 0.0, 0.5));
    CHECK_THROWS(simplify_branches(1, 1, 0.5, 1.0));
}

TEST_CASE("dep_round: integral input is returned unchanged with no simplify calls") {
    Rng rng(3);
    DepRoundStats st;
    const RoundingInput in = RoundingInput::unit({0, 1, 1, 0});
    const RoundingOutcome out = dep_round(in, rng, &st);
    CHECK(out.x == in.p);
    CHECK(st.simplify_calls == 0);
    CHECK_FALSE(out.fractional_index.has_value());
}

TEST_CASE("dep_round: two halves become one of (1,0) and (0,1) with equal probability") {
    const auto dist = exact_distribution(RoundingInput::unit({0.5, 0.5}));
    double p10 = 0, p01 = 0;
    for (const auto& o : dist) {
        if (o.x == std::vector<double>{1, 0}) p10 += o.prob;
        if (o.x == std::vector<double>{0, 1}) p01 += o.prob;
    }
    CHECK(p10 == doctest::Approx(0.5));
    CHECK(p01 == doctest::Approx(0.5));
}

TEST_CASE("dep_round: integer unit-weight sum leaves no fractional entry") {
    Rng rng(11);
    const RoundingInput in = RoundingInput::unit({0.3, 0.5, 0.7, 0.5});
    for (int t = 0; t < 2000; ++t) {
        const RoundingOutcome out = dep_round(in, rng);
        REQUIRE(fractional_count(out.x) == 0);
        REQUIRE(std::accumulate(out.x.begin(), out.x.end(), 0.0) == doctest::Approx(2.0));
    }
}

TEST_CASE("dep_round: property, at most one fractional entry and preserved weighted sum") {
    Rng gen(21);
    for (int s = 0; s < 3000; ++s) {
        RoundingInput in;
        const std::size_t n = 1 + gen.below(40);
        for (std::size_t i = 0; i < n; ++i) {
            in.p.push_back(gen.uniform());
            in.a.push_back(1 + gen.uniform());
        }
        Rng rng = Rng::stream(21, s);
        const RoundingOutcome out = dep_round(in, rng);
        REQUIRE(fractional_count(out.x) <= 1);
        if (out.fractional_index) REQUIRE(is_fractional(out.x[*out.fractional_index]));
        REQUIRE(std::fabs(weighted_sum(in.a, out.x) - weighted_sum(in.a, in.p)) <= 1e-9);
    }
}

TEST_CASE("dep_round: marginals on a weighted input (n = 20)") {
    Rng gen(5);
    RoundingInput in;
    for (int i = 0; i < 20; ++i) {
        in.p.push_back(gen.uniform());
        in.a.push_back(1 + gen.uniform());
    }
    const std::uint64_t T = 100000;
    std::vector<double> sum(20, 0);
    Rng rng(6);
    for (std::uint64_t t = 0; t < T; ++t) {
        const RoundingOutcome out = dep_round(in, rng);
        for (int i = 0; i < 20; ++i) sum[i] += out.x[i];
    }
    for (int i = 0; i < 20; ++i) {
        const double sigma = std::sqrt(in.p[i] * (1 - in.p[i]) / T);
        CHECK(std::fabs(sum[i] / T - in.p[i]) <= 4 * sigma + 1e-12);
    }
}

TEST_CASE("resolve_fractional policies") {
    Rng rng(1);
    RoundingOutcome none{{1, 0, 1}, std::nullopt};
    CHECK(resolve_fractional(none, ResolvePolicy::Bernoulli, rng) == none.x);
    RoundingOutcome frac{{1, 0.3, 0}, 1};
    CHECK(resolve_fractional(frac, ResolvePolicy::Up, rng)[1] == 1.0);
    CHECK(resolve_fractional(frac, ResolvePolicy::Down, rng)[1] == 0.0);
    CHECK(resolve_fractional(frac, ResolvePolicy::Keep, rng)[1] == 0.3);
    const int T = 200000;
    int ones = 0;
    for (int t = 0; t < T; ++t) ones += resolve_fractional(frac, ResolvePolicy::Bernoulli, rng)[1] > 0.5;
    CHECK(std::fabs(ones / double(T) - 0.3) <= 4 * std::sqrt(0.21 / T));
    CHECK(parse_policy("up") == ResolvePolicy::Up);
    CHECK_THROWS(parse_policy("sideways"));
}

TEST_CASE("bound formulas: substitution values") {
    for (auto br : {bound_general(100, 1, 0.3), bound_uniform(100, 1, 0.3), bound_unweighted(100, 1, 0.4, 0.3)}) {
        CHECK(br.lower == 1.0);
        CHECK(br.upper == 1.0);
    }
    const BoundBracket g = bound_general(1000, 3, 0.5);
    CHECK(g.lower == doctest::Approx(0.89029).epsilon(1e-5));
    CHECK(g.upper == doctest::Approx(1.11272).epsilon(1e-5));
    const BoundBracket u = bound_uniform(200, 2, 0.5);
    CHECK(u.lower == doctest::Approx(1 - 16.0 / 150));
    CHECK(u.upper == doctest::Approx(1 + 16.0 / 150));
    const BoundBracket w = bound_unweighted(200, 2, 0.5, 0.5);
    CHECK(w.lower == doctest::Approx(0.96));
    CHECK(w.upper == doctest::Approx(1.04));
    // Raw formula, no clamping.
    CHECK(bound_general(10, 8, 0.1).lower < 0);
}

TEST_CASE("bound_uniform is tighter than bound_general for small alpha") {
    for (double alpha : {0.05, 0.1, 0.2, 0.3})
        for (int t : {2, 3, 4}) {
            const BoundBracket g = bound_general(10000, t, alpha), u = bound_uniform(10000, t, alpha);
            CHECK(u.lower >= g.lower);
            CHECK(u.upper <= g.upper);
        }
}

TEST_CASE("bound_alt_lower and choose_d") {
    CHECK(bound_alt_lower(100, 1, 0.5, 3) == doctest::Approx(1 - 3.0 / 99));
    const int d = choose_d(1e4, 0.5);
    CHECK(d == 19);
    const double v = bound_alt_lower(1e4, 10, 0.5, d);
    CHECK(v > 0);
    CHECK(v < 1);
    CHECK_THROWS(bound_alt_lower(100, 10, 0.5, 20));
}

TEST_CASE("near-independence query aggregates") {
    const RoundingInput in = RoundingInput::unit(std::vector<double>(10, 0.5));
    NearIndependenceQuery q;
    q.I_plus = {0, 1};
    q.I_minus = {2};
    CHECK(q.t() == 3);
    CHECK(q.lambda(in) == doctest::Approx(0.125));
    CHECK(q.q_hat(in) == doctest::Approx(0.5));
    CHECK(q.alpha_hat(in) == doctest::Approx(0.5));
    CHECK(NearIndependenceQuery::alpha(in) == doctest::Approx(0.5));
    NearIndependenceQuery bad;
    bad.I_plus = {1};
    bad.I_minus = {1};
    CHECK_THROWS(bad.check(10));
}

TEST_CASE("estimate_joint: empty event and a marginal") {
    const RoundingInput in = RoundingInput::unit({0.5, 0.5});
    const Estimate e0 = estimate_joint(in, {}, 1000, ResolvePolicy::Bernoulli, 1);
    CHECK(e0.mean == 1.0);
    CHECK(e0.stderr_ == 0.0);
    NearIndependenceQuery q;
    q.I_plus = {0};
    const Estimate e = estimate_joint(in, q, 100000, ResolvePolicy::Bernoulli, 2);
    CHECK(std::fabs(e.mean - 0.5) <= 4 * std::sqrt(0.25 / 100000));
}

TEST_CASE("estimate_joint: reproducible for a fixed seed and worker count") {
    const RoundingInput in = RoundingInput::unit(std::vector<double>(30, 0.4));
    NearIndependenceQuery q;
    q.I_plus = {0, 1};
    const Estimate a = estimate_joint(in, q, 20000, ResolvePolicy::Bernoulli, 9, 3);
    const Estimate b = estimate_joint(in, q, 20000, ResolvePolicy::Bernoulli, 9, 3);
    CHECK(a.mean == b.mean);
}

TEST_CASE("exact oracle: small cases and agreement with sampling") {
    const RoundingInput two = RoundingInput::unit({0.5, 0.5});
    NearIndependenceQuery both;
    both.I_plus = {0, 1};
    CHECK(exact_joint_small(two, both) == doctest::Approx(0.0));
    NearIndependenceQuery mixed;
    mixed.I_plus = {0};
    mixed.I_minus = {1};
    CHECK(exact_joint_small(two, mixed) == doctest::Approx(0.5));

    RoundingInput in = RoundingInput::unit({0.3, 0.5, 0.7, 0.5});
    NearIndependenceQuery q;
    q.I_plus = {0, 2};
    const double exact = exact_joint_small(in, q);
    const Estimate e = estimate_joint(in, q, 200000, ResolvePolicy::Bernoulli, 4);
    CHECK(std::fabs(e.mean - exact) <= 4 * std::sqrt(exact * (1 - exact) / 200000) + 1e-12);

    // All sign patterns on a weighted n = 5 input with a fractional leftover.
    RoundingInput w{{0.2, 0.6, 0.45, 0.8, 0.35}, {1, 1.5, 1.2, 1.9, 1}};
    for (int pattern = 0; pattern < 8; ++pattern) {
        NearIndependenceQuery pq;
        for (std::size_t b = 0; b < 3; ++b) (pattern >> b & 1 ? pq.I_plus : pq.I_minus).push_back(b);
        const double ex = exact_joint_small(w, pq);
        const Estimate es = estimate_joint(w, pq, 100000, ResolvePolicy::Keep, 40 + pattern);
        CHECK(std::fabs(es.mean - ex) <= 4 * std::max(es.stderr_, 1e-4));
    }
    CHECK_THROWS(exact_distribution(RoundingInput::unit(std::vector<double>(7, 0.5))));
}
