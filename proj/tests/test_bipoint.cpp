#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "kmr/bipoint.hpp"
#include "kmr/nlp.hpp"

using namespace kmr;

namespace {

struct Fixture {
    RegimeInstance ri;
    StarDecomposition dec;
};

Fixture main_fixture(std::uint64_t seed) {
    Fixture f{synth_regime_instance(seed), {}};
    f.dec = *decompose_stars(f.ri.inst, f.ri.bp);
    return f;
}

bool contains(const std::vector<int>& sorted, int f) { return std::binary_search(sorted.begin(), sorted.end(), f); }

// Random bi-point on a random Euclidean instance: F1 of size m1, F2 of size m2 > m1.
std::pair<Instance, BiPointSolution> random_bipoint(std::uint64_t seed) {
    Rng rng(seed);
    const int nf = 8 + static_cast<int>(rng.below(10));
    const int m1 = 1 + static_cast<int>(rng.below(nf / 2));
    const int m2 = m1 + 1 + static_cast<int>(rng.below(nf - m1));
    const int k = m1 + static_cast<int>(rng.below(m2 - m1 + 1));
    Instance inst = gen_random_instance(seed, nf, 20, k, GenMode::Euclidean);
    std::vector<int> ids(nf);
    for (int i = 0; i < nf; ++i) ids[i] = i;
    BiPointSolution bp;
    bp.f1 = rng.sample(ids, m1);
    bp.f2 = rng.sample(ids, m2);
    std::sort(bp.f1.begin(), bp.f1.end());
    std::sort(bp.f2.begin(), bp.f2.end());
    bp.a = static_cast<double>(m2 - k) / (m2 - m1);
    bp.b = 1 - bp.a;
    bp.d1 = connection_cost(inst, bp.f1);
    bp.d2 = connection_cost(inst, bp.f2);
    return {inst, bp};
}

// Same geometry with a different budget k, i.e. a different (a, b).
std::pair<Instance, BiPointSolution> with_budget(const RegimeInstance& ri, int k) {
    Instance inst = ri.inst;
    inst.k = k;
    BiPointSolution bp = ri.bp;
    const double delta = static_cast<double>(bp.f2.size() - bp.f1.size());
    bp.b = (k - static_cast<double>(bp.f1.size())) / delta;
    bp.a = 1 - bp.b;
    return {inst, bp};
}

int center_or_leaves_failures(const StarDecomposition& dec, const RoundingParams& params, const std::vector<int>& open) {
    int bad = 0;
    for (std::size_t s = 0; s < dec.stars.size(); ++s) {
        if (dec.kind[s] == StarKind::C0 || params.p(dec.kind[s]) + params.q(dec.kind[s]) < 1 - 1e-12) continue;
        if (contains(open, dec.stars[s].center)) continue;
        for (int leaf : dec.stars[s].leaves)
            if (!contains(open, leaf)) {
                ++bad;
                break;
            }
    }
    return bad;
}

}  // namespace

TEST_CASE("decompose_stars: two centers, three leaves") {
    // A=(0,0), B=(10,0) in F1; X, Y near A and Z near B in F2.
    const Instance inst = Instance::euclidean({{0, 0}, {10, 0}, {1, 0}, {0, 1}, {10, 1}},
                                              {{1, 0.2}, {0.2, 1}, {10, 1.2}}, 2);
    BiPointSolution bp;
    bp.f1 = {0, 1};
    bp.f2 = {2, 3, 4};
    bp.a = 1;
    bp.b = 0;
    bp.d1 = connection_cost(inst, bp.f1);
    bp.d2 = connection_cost(inst, bp.f2);
    const auto dec = decompose_stars(inst, bp);
    REQUIRE(dec);
    CHECK(dec->stars[0].leaves == std::vector<int>{2, 3});
    CHECK(dec->stars[1].leaves == std::vector<int>{4});
    CHECK(dec->kind[0] == StarKind::T2);
    CHECK(dec->delta_f == 1);
    CHECK(dec->r0 == 0.0);
    CHECK(dec->s0 == 1.0);
    CHECK(dec->n_c1() == 1);
    CHECK(dec->n_c1a() == 1);  // ceil(a * Delta_F) = 1
}

TEST_CASE("decompose_stars: every leaf nearest one center gives a single 2-star") {
    const Instance inst = Instance::euclidean({{0, 0}, {50, 0}, {1, 0}, {0, 1}, {-1, 0}}, {{0.5, 0}}, 2);
    BiPointSolution bp;
    bp.f1 = {0, 1};
    bp.f2 = {2, 3, 4};
    bp.a = 1;
    bp.b = 0;
    bp.d1 = connection_cost(inst, bp.f1);
    bp.d2 = connection_cost(inst, bp.f2);
    const auto dec = decompose_stars(inst, bp);
    REQUIRE(dec);
    CHECK(dec->n_c2() == 1);
    CHECK(dec->n_c0() == 1);
    CHECK(dec->stars[0].size() == 3);
}

TEST_CASE("decompose_stars: Delta_F = 0 is refused") {
    const Instance inst = gen_random_instance(1, 4, 6, 2, GenMode::Euclidean);
    BiPointSolution bp;
    bp.f1 = bp.f2 = {0, 1};
    bp.d1 = bp.d2 = connection_cost(inst, bp.f1);
    CHECK_FALSE(decompose_stars(inst, bp).has_value());
}

TEST_CASE("decompose_stars: partition, T1A order and the r2 / |L2| claims on random bi-points") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto [inst, bp] = random_bipoint(seed);
        const auto dec = decompose_stars(inst, bp);
        if (!dec) continue;
        ++checked;
        std::multiset<int> leaves;
        std::set<int> centers;
        for (const Star& s : dec->stars) {
            centers.insert(s.center);
            leaves.insert(s.leaves.begin(), s.leaves.end());
            for (int leaf : s.leaves) {
                // Nearest F1 facility with lowest-id ties.
                for (int c : dec->f1) {
                    const double dc = inst.ff(c, leaf), ds = inst.ff(s.center, leaf);
                    REQUIRE((dc > ds || (dc == ds && c >= s.center)));
                }
            }
        }
        CHECK(leaves == std::multiset<int>(dec->f2.begin(), dec->f2.end()));
        CHECK(centers == std::set<int>(dec->f1.begin(), dec->f1.end()));
        CHECK(dec->n_c0() + dec->n_c1() + dec->n_c2() == static_cast<int>(dec->f1.size()));
        CHECK(dec->r2 <= 1 / dec->s0 + 1e-12);
        CHECK(static_cast<double>(dec->n_l2()) / dec->delta_f <= 2 / dec->s0 + 1e-12);
        CHECK(dec->s0 == doctest::Approx(1 / (1 + dec->r0)));
        CHECK(dec->n_c1a() == std::min(dec->n_c1(), static_cast<int>(std::ceil(dec->a * dec->delta_f - 1e-9))));
        for (std::size_t i = 1; i < dec->t1a.size(); ++i) CHECK(dec->g_star[dec->t1a[i - 1]] >= dec->g_star[dec->t1a[i]]);
        if (!dec->t1a.empty() && !dec->t1b.empty()) CHECK(dec->g_star[dec->t1a.back()] >= dec->g_star[dec->t1b.front()]);
    }
    CHECK(checked > 200);
}

TEST_CASE("classify_client: ties go to P, one class per client, the (1B,2) guard") {
    // One F1 center and one F2 leaf at equal distance from the client.
    const Instance inst = Instance::euclidean({{0, 0}, {2, 0}, {2, 2}}, {{1, 0}}, 1);
    BiPointSolution bp;
    bp.f1 = {0};
    bp.f2 = {1, 2};
    bp.a = 1;
    bp.b = 0;
    bp.d1 = connection_cost(inst, bp.f1);
    bp.d2 = connection_cost(inst, bp.f2);
    const auto dec = decompose_stars(inst, bp);
    REQUIRE(dec);
    const ClientGeometry j = classify_client(inst, *dec, 0);
    CHECK(j.d1 == doctest::Approx(j.d2));
    CHECK(j.sign == Sign::P);

    const NlpProgram nlp;
    std::set<std::string> names;
    for (const ClientClass& c : nlp.classes()) names.insert(c.name());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Fixture f = main_fixture(seed);
        for (int c = 0; c < f.ri.inst.nc(); ++c) {
            const ClientGeometry g = classify_client(f.ri.inst, f.dec, c);
            REQUIRE(names.count(g.class_name()) == 1);
            if (g.x == StarKind::T1B && g.y == StarKind::T2) {
                const bool primed = f.dec.g * (g.d1 + g.d2) < 2 * g.d2;
                CHECK(primed == (g.sign == Sign::Pp || g.sign == Sign::Np));
                // Unprimed (1B,2) clients keep the c120 correction term nonnegative.
                if (!primed) CHECK(g.d1 - g.d2 + f.dec.g * (g.d1 + g.d2) >= -1e-12);
            }
            if ((g.sign == Sign::P || g.sign == Sign::Pp)) CHECK(g.d2 <= g.d1);
            else CHECK(g.d2 > g.d1);
        }
    }
}

TEST_CASE("algorithm A: the A8 row opens T1B leaves and L2 only") {
    const Fixture f = main_fixture(3);
    const RoundingParams a8 = table1(f.dec.b, f.dec.s0, 0.05)[7];
    REQUIRE(a8.label == "A8");
    Rng rng(1);
    const std::vector<int> open = algorithm_a_open(f.dec, a8, rng);
    std::vector<int> expected = f.dec.l2_leaves();
    for (int s : f.dec.t1b) expected.push_back(f.dec.stars[s].leaves.front());
    std::sort(expected.begin(), expected.end());
    CHECK(open == expected);
}

TEST_CASE("algorithm A: p0 = 1 opens every 0-star center") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Fixture f = main_fixture(seed);
        RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[1];
        REQUIRE(p.p0 == 1.0);
        Rng rng(seed);
        const std::vector<int> open = algorithm_a_open(f.dec, p, rng);
        for (int s : f.dec.t0) CHECK(contains(open, f.dec.stars[s].center));
    }
}

TEST_CASE("algorithm A: per-sample caps and center-or-leaves for every Table 1 row") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Fixture f = main_fixture(100 + seed);
        const auto rows = table1(f.dec.b, f.dec.s0, 0.05);
        for (const RoundingParams& p : rows) {
            const FacilityCap cap = algorithm_a_cap(f.dec, p);
            CHECK(cap.expected <= f.dec.k + 1 + 1e-9);
            for (int t = 0; t < 100; ++t) {
                Rng rng = Rng::stream(seed, t);
                Round2StarsStats st;
                const std::vector<int> open = algorithm_a_open(f.dec, p, rng, &st);
                REQUIRE(static_cast<int>(open.size()) <= cap.cap);
                REQUIRE(center_or_leaves_failures(f.dec, p, open) == 0);
                for (const auto& [opened, group_cap] : st.group_opened) REQUIRE(opened <= group_cap);
            }
        }
    }
}

TEST_CASE("algorithm A: 1000 runs of A2 stay within the A2 cap") {
    const Fixture f = main_fixture(8);
    const RoundingParams a2 = table1(f.dec.b, f.dec.s0, 0.05)[1];
    const FacilityCap cap = algorithm_a_cap(f.dec, a2);
    for (int t = 0; t < 1000; ++t) {
        Rng rng = Rng::stream(77, t);
        const PseudoSolution ps = algorithm_A(f.ri.inst, f.dec, a2, rng);
        REQUIRE(ps.extra <= cap.cap - f.dec.k);
        REQUIRE(ps.connection_cost == connection_cost(f.ri.inst, ps.open_set));
    }
}

TEST_CASE("round2stars: all stars large") {
    const Fixture f = main_fixture(4);
    RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[0];
    p.eta = 1.0;  // size threshold 1/(p2 eta) <= 2 / ... makes every 2-star large when p2 >= 1/2
    p.p2 = 0.5;
    p.q2 = 0.5;
    std::vector<int> open;
    Rng rng(3);
    Round2StarsStats st;
    round2stars(f.dec, p, rng, open, &st);
    CHECK(st.large_stars == f.dec.n_c2());
    CHECK(st.groups == 0);
    int centers = 0, leaves = 0;
    for (int x : open) (f.dec.center_star[x] >= 0 ? centers : leaves)++;
    CHECK(centers == f.dec.n_c2());
    CHECK(leaves == static_cast<int>(std::ceil(0.5 * (f.dec.n_l2() - f.dec.n_c2()) - 1e-9)));
}

TEST_CASE("round2stars: rejects endpoint p2") {
    const Fixture f = main_fixture(4);
    RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[7];
    std::vector<int> open;
    Rng rng(1);
    CHECK_THROWS(round2stars(f.dec, p, rng, open));
}

TEST_CASE("Lemma 3.9 style probability bounds under A2") {
    const Fixture f = main_fixture(12);
    const RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[1];
    const int T = 4000;
    const int nc = f.ri.inst.nc();
    std::vector<ClientGeometry> geo;
    for (int c = 0; c < nc; ++c) geo.push_back(classify_client(f.ri.inst, f.dec, c));
    std::vector<int> c1(nc, 0), c2(nc, 0), c12(nc, 0);
    for (int t = 0; t < T; ++t) {
        Rng rng = Rng::stream(99, t);
        const std::vector<int> open = algorithm_a_open(f.dec, p, rng);
        for (int c = 0; c < nc; ++c) {
            const bool o1 = contains(open, geo[c].i1), o2 = contains(open, geo[c].i2);
            c1[c] += !o1;
            c2[c] += !o2;
            c12[c] += !o1 && !o2;
        }
    }
    auto sigma = [&](double q) { return std::sqrt(std::max(q * (1 - q), 1.0 / T) / T); };
    for (int c = 0; c < nc; ++c) {
        const double b1 = 1 - p.p(geo[c].x), b2 = (1 + p.eta) * (1 - p.q(geo[c].y)), b12 = (1 + p.eta) * b1 * (1 - p.q(geo[c].y));
        CHECK(c1[c] / double(T) <= b1 + 4 * sigma(b1));
        CHECK(c2[c] / double(T) <= b2 + 4 * sigma(std::min(b2, 1.0)));
        CHECK(c12[c] / double(T) <= b12 + 4 * sigma(std::min(b12, 1.0)));
    }
}

TEST_CASE("cost_bound: substitution examples") {
    ClientGeometry j;
    j.i1 = 0;
    j.i2 = 1;
    j.x = StarKind::T2;
    j.y = StarKind::T2;
    j.d1 = 3;
    j.d2 = 2;
    RoundingParams all;
    all.p2 = 1;
    all.q2 = 1;
    all.eta = 0.05;
    CHECK(*cost_bound(j, all, 1.0).c213 == doctest::Approx(2.0));

    // p_X = q_Y = 0 with p_Y = 1 keeps the bound applicable.
    j.x = StarKind::C0;
    j.d1 = j.d2 = 1.5;
    RoundingParams none;
    none.p0 = 0;
    none.p2 = 1;
    none.q2 = 0;
    none.eta = 0;
    CHECK(*cost_bound(j, none, 1.0).c213 == doctest::Approx(4.5));

    ClientGeometry missing;
    CHECK_THROWS(cost_bound(missing, all, 1.0));
}

TEST_CASE("cost_bound: empirical client cost under A2 stays below the bound") {
    const Fixture f = main_fixture(21);
    const RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[1];
    const int T = 20000;
    const int nc = f.ri.inst.nc();
    std::vector<double> sum(nc, 0), sum2(nc, 0);
    for (int t = 0; t < T; ++t) {
        Rng rng = Rng::stream(5, t);
        const Solution s = evaluate(f.ri.inst, algorithm_a_open(f.dec, p, rng));
        for (int c = 0; c < nc; ++c) {
            const double d = f.ri.inst.fc(s.assignment[c], c);
            sum[c] += d;
            sum2[c] += d * d;
        }
    }
    int bounded = 0;
    for (int c = 0; c < nc; ++c) {
        const ClientGeometry g = classify_client(f.ri.inst, f.dec, c);
        const double bound = cost_bound(g, p, f.dec.g).best();
        if (!std::isfinite(bound)) continue;
        ++bounded;
        const double mean = sum[c] / T, var = std::max(0.0, sum2[c] / T - mean * mean);
        CHECK(mean <= bound + 4 * std::sqrt(var / T) + 1e-12);
    }
    CHECK(bounded > 0);
}

TEST_CASE("run_main_case: determinism, min over candidates, regime guard") {
    const Fixture f = main_fixture(30);
    const PseudoSolution a = run_main_case(f.ri.inst, f.dec, 0.05, 9);
    const PseudoSolution b = run_main_case(f.ri.inst, f.dec, 0.05, 9);
    CHECK(a.open_set == b.open_set);
    CHECK(a.provenance == b.provenance);
    REQUIRE(a.candidates.size() == 9);
    for (const auto& [name, cost] : a.candidates) CHECK(a.connection_cost <= cost);
    StarDecomposition r1 = f.dec;
    r1.r1 = 1.0;
    CHECK_THROWS(run_main_case(f.ri.inst, r1, 0.05, 9));
}

TEST_CASE("run_r1_case: ten rows, min, caps") {
    const Fixture f = main_fixture(31);
    StarDecomposition r1 = f.dec;
    r1.r1 = 1.0;
    REQUIRE(classify_regime(&r1) == Regime::R1);
    const PseudoSolution a = run_r1_case(f.ri.inst, r1, 0.05, 4);
    const PseudoSolution b = run_r1_case(f.ri.inst, r1, 0.05, 4);
    CHECK(a.open_set == b.open_set);
    REQUIRE(a.candidates.size() == 10);
    for (const auto& [name, cost] : a.candidates) CHECK(a.connection_cost <= cost);
    for (const RoundingParams& p : table2(r1.b, r1.s0, 0.05)) {
        const FacilityCap cap = algorithm_a_cap(r1, p);
        for (int t = 0; t < 50; ++t) {
            Rng rng = Rng::stream(t, 2);
            REQUIRE(static_cast<int>(algorithm_a_open(r1, p, rng).size()) <= cap.cap);
        }
    }
    CHECK_THROWS(run_r1_case(f.ri.inst, f.dec, 0.05, 4));
}

TEST_CASE("knapsack_close_centers: budget extremes and the k + 2 cap") {
    const Fixture f = main_fixture(40);
    std::vector<int> l1;
    for (int s : f.dec.t1) l1.push_back(f.dec.stars[s].leaves.front());

    StarDecomposition rich = f.dec;
    rich.k = 1000000;
    Rng rng(1);
    std::vector<int> all_leaves = l1;
    for (int x : f.dec.l2_leaves()) all_leaves.push_back(x);
    std::sort(all_leaves.begin(), all_leaves.end());
    CHECK(knapsack_close_centers(f.ri.inst, rich, rng).open_set == all_leaves);

    StarDecomposition poor = f.dec;
    poor.k = static_cast<int>(l1.size()) + f.dec.n_c2();
    std::vector<int> base = l1;
    for (int s : f.dec.t2) base.push_back(f.dec.stars[s].center);
    std::sort(base.begin(), base.end());
    CHECK(knapsack_close_centers(f.ri.inst, poor, rng).open_set == base);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Fixture g = main_fixture(200 + seed);
        Rng r(seed);
        const PseudoSolution ps = knapsack_close_centers(g.ri.inst, g.dec, r);
        CHECK(static_cast<int>(ps.open_set.size()) <= g.dec.k + 2);
        // The uniform point x_i = 1 - a s0 fits the knapsack budget.
        double used = 0;
        for (int s : g.dec.t2) used += (1 - g.dec.a * g.dec.s0) * (g.dec.stars[s].size() - 1.0);
        CHECK(used <= g.dec.k - g.dec.n_c1() - g.dec.n_c2() + 1e-9);
    }
}

TEST_CASE("savings_open_f1: F1 plus the leaf prefix, at most k + 1") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Fixture f = main_fixture(300 + seed);
        const PseudoSolution ps = savings_open_f1(f.ri.inst, f.dec);
        const std::size_t n = static_cast<std::size_t>(std::ceil(0.5 * f.dec.b * f.dec.s0 * f.dec.n_l2() - 1e-9));
        CHECK(ps.open_set.size() == f.dec.f1.size() + n);
        for (int c : f.dec.f1) CHECK(contains(ps.open_set, c));
        if (f.dec.s0 <= 2.0 * f.dec.delta_f / f.dec.n_l2()) CHECK(static_cast<int>(ps.open_set.size()) <= f.dec.k + 1);
    }
}

TEST_CASE("edge_dispatch: small b, large b and Delta_F = 0") {
    int small_seen = 0, large_seen = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const RegimeInstance ri = synth_regime_instance(500 + seed);
        const int nf1 = static_cast<int>(ri.bp.f1.size());
        const int delta = static_cast<int>(ri.bp.f2.size()) - nf1;
        {
            const int k = nf1 + static_cast<int>(std::floor(0.2 * delta));
            const auto [inst, bp] = with_budget(ri, k);
            if (bp.b > 0 && bp.b <= 0.25) {
                const DispatchResult r = edge_dispatch(inst, bp, 0.05, seed);
                CHECK(r.regime == Regime::SmallB);
                CHECK(r.solution.provenance == "F1");
                CHECK(r.solution.connection_cost / bp.cost() <= 1 / (1 - bp.b) + 1e-9);
                ++small_seen;
            }
        }
        {
            const int k = nf1 + static_cast<int>(std::ceil(0.9 * delta));
            const auto [inst, bp] = with_budget(ri, k);
            if (bp.b >= 5.0 / 6 && bp.b < 1) {
                const DispatchResult r = edge_dispatch(inst, bp, 0.05, seed);
                CHECK(r.regime == Regime::LargeB);
                CHECK(r.solution.provenance == "knapsack");
                CHECK(r.solution.connection_cost / bp.cost() <= 1 + 2 * bp.a + 1e-9);
                ++large_seen;
            }
        }
    }
    CHECK(small_seen > 10);
    CHECK(large_seen > 10);

    const Instance inst = gen_random_instance(2, 5, 10, 2, GenMode::Euclidean);
    BiPointSolution bp;
    bp.f1 = bp.f2 = {1, 3};
    bp.d1 = bp.d2 = connection_cost(inst, bp.f2);
    const DispatchResult r = edge_dispatch(inst, bp, 0.05, 1);
    CHECK(r.regime == Regime::DeltaZero);
    CHECK(r.solution.open_set == bp.f2);
}

TEST_CASE("edge_dispatch: regime boundaries") {
    StarDecomposition d;
    d.s0 = 1;
    d.r1 = 2;
    d.r_d = 0.5;
    d.b = 0.25;
    CHECK(classify_regime(&d) == Regime::SmallB);
    d.b = 5.0 / 6;
    CHECK(classify_regime(&d) == Regime::LargeB);
    d.b = 0.6;
    CHECK(classify_regime(&d) == Regime::Main);
    d.b = 0.508;
    CHECK(classify_regime(&d) == Regime::Main);
    d.b = 0.507;
    CHECK(classify_regime(&d) == Regime::Band);
    d.b = 0.6;
    d.r_d = 0.7;
    CHECK(classify_regime(&d) == Regime::Band);
    d.r_d = 0.5;
    d.s0 = 0.8;
    CHECK(classify_regime(&d) == Regime::SmallS0);
    d.s0 = 1;
    d.r1 = 1;
    CHECK(classify_regime(&d) == Regime::R1);
    CHECK(classify_regime(nullptr) == Regime::DeltaZero);
}

TEST_CASE("dichotomy: Case 2 costs exactly D2 and no small stars skips Case 1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Fixture f = main_fixture(600 + seed);
        const RoundingParams p = table1(f.dec.b, f.dec.s0, 0.05)[1];
        Rng rng(seed);
        DichotomyOutcome rep;
        const PseudoSolution ps = dichotomy_round(f.ri.inst, f.dec, p, rng, &rep);
        REQUIRE(rep.which == 2);
        CHECK(ps.connection_cost == f.dec.d2);
        CHECK(ps.open_set == f.dec.f2);
    }
}

namespace {

// All-2-star decomposition without an instance: `n_small` stars with 2 leaves and
// `n_large` stars with `large_size` leaves.
StarDecomposition two_star_decomposition(int n_small, int n_large, int large_size) {
    StarDecomposition d;
    const int ns = n_small + n_large;
    int next = ns;
    for (int s = 0; s < ns; ++s) {
        Star st;
        st.center = s;
        const int size = s < n_small ? 2 : large_size;
        for (int l = 0; l < size; ++l) st.leaves.push_back(next++);
        d.stars.push_back(st);
        d.f1.push_back(s);
        d.t2.push_back(s);
        d.kind.push_back(StarKind::T2);
    }
    for (int f = ns; f < next; ++f) d.f2.push_back(f);
    d.center_star.assign(next, -1);
    d.star_of_facility.assign(next, -1);
    for (int s = 0; s < ns; ++s) {
        d.center_star[s] = s;
        for (int l : d.stars[s].leaves) d.star_of_facility[l] = s;
    }
    d.delta_f = next - 2 * ns;
    d.b = 0.5;
    d.a = 0.5;
    d.k = ns + d.delta_f / 2;
    return d;
}

RoundingParams half_params(double eta) {
    RoundingParams p;
    p.p2 = 0.5;
    p.q2 = 0.5;
    p.eta = eta;
    return p;
}

}  // namespace

TEST_CASE("dichotomy: Case 1 budget violations are rarer than the tail bound") {
    const StarDecomposition d = two_star_decomposition(600, 0, 0);
    const RoundingParams p = half_params(0.5);
    const DichotomyThresholds th = dichotomy_thresholds(p.eta, p.beta());
    REQUIRE(600 > th.f);
    const double bound = std::exp(-std::pow(p.eta, 3) * (1 - p.eta) * p.beta() * th.f / (3 * th.c0));
    const int T = 2000;
    int violated = 0;
    for (int t = 0; t < T; ++t) {
        Rng rng = Rng::stream(17, t);
        const DichotomyOutcome out = dichotomy_open(d, p, rng);
        REQUIRE(out.which == 1);
        CHECK(out.small_budget == doctest::Approx(0.5 * 600 + 0.5 * 1200));
        violated += out.budget_violated;
    }
    CHECK(violated / double(T) <= bound + 3 * std::sqrt(bound * (1 - bound) / T));
}

TEST_CASE("dichotomy: few small stars and many leaves give Case 3") {
    const StarDecomposition d = two_star_decomposition(0, 10, 200);
    const RoundingParams p = half_params(0.5);
    const DichotomyThresholds th = dichotomy_thresholds(p.eta, p.beta());
    REQUIRE(d.n_l2() > th.g);
    Rng rng(4);
    const DichotomyOutcome out = dichotomy_open(d, p, rng);
    CHECK(out.which == 3);
    CHECK(out.open_set.size() == 10 + static_cast<std::size_t>(std::ceil(0.5 * 0.5 * 2000)));
    for (int s = 0; s < 10; ++s) CHECK(contains(out.open_set, s));
}

TEST_CASE("dichotomy: thresholds") {
    const DichotomyThresholds th = dichotomy_thresholds(0.5, 0.5);
    CHECK(th.f == doctest::Approx(6 / (0.125 * 0.5 * 0.5) * std::log(4.0)));
    CHECK(th.g == doctest::Approx(4 * th.f));
    CHECK_THROWS(dichotomy_thresholds(1.0, 0.5));
    CHECK_THROWS(dichotomy_thresholds(0.5, 0.0));
}
