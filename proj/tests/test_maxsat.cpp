#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kmr/maxsat.hpp"

using namespace kmr;

namespace {

RawCnf raw_with_costs(int n, double a, double b, double budget) {
    RawCnf raw;
    raw.n = n;
    raw.a_cost = a;
    raw.b_cost = b;
    raw.budget = budget;
    raw.clauses.push_back({{0, 1}, {2}, 2.0});
    raw.clauses.push_back({{}, {0, 3}, 1.5});
    return raw;
}

CnfInstance single(std::vector<int> pos, std::vector<int> neg, double w, int n, int k) {
    CnfInstance inst;
    inst.n = n;
    inst.k = k;
    inst.clauses.push_back({std::move(pos), std::move(neg), w});
    return inst;
}

// Bitmask enumeration in increasing mask order, independent of the library's search.
double enumerate_masks(const CnfInstance& inst) {
    double best = 0;
    for (std::uint32_t mask = 0; mask < (1u << inst.n); ++mask) {
        if (__builtin_popcount(mask) > inst.k) continue;
        std::vector<char> x(inst.n);
        for (int j = 0; j < inst.n; ++j) x[j] = mask >> j & 1;
        best = std::max(best, satisfied_weight(inst, x));
    }
    return best;
}

}  // namespace

TEST_CASE("normalize_budget: orientation and derived k") {
    const CnfInstance plain = normalize_budget(raw_with_costs(5, 1, 0, 3));
    CHECK(plain.k == 3);
    CHECK_FALSE(plain.complemented);
    CHECK(plain.clauses[0].pos == std::vector<int>{0, 1});

    const CnfInstance flipped = normalize_budget(raw_with_costs(5, 0, 1, 3));
    CHECK(flipped.k == 3);
    CHECK(flipped.complemented);
    CHECK(flipped.clauses[0].pos == std::vector<int>{2});
    CHECK(flipped.clauses[0].neg == std::vector<int>{0, 1});

    const CnfInstance vacuous = normalize_budget(raw_with_costs(5, 1, 1, 5));
    CHECK(vacuous.k == 5);

    CHECK_THROWS(normalize_budget(raw_with_costs(5, 1, 1, 4)));
    CHECK_THROWS(normalize_budget(raw_with_costs(5, 2, 1, 4)));
    CHECK(normalize_budget(raw_with_costs(5, 3, 1, 9)).k == 2);
    CHECK_THROWS(normalize_budget(raw_with_costs(5, -1, 0, 3)));
}

TEST_CASE("normalize_budget: complemented assignments map back to raw costs") {
    const RawCnf raw = raw_with_costs(4, 0, 1, 2);
    const CnfInstance inst = normalize_budget(raw);
    const ExactResult best = brute_force_maxsat(inst);
    const std::vector<char> x = to_raw_assignment(inst, best.x);
    double cost = 0;
    for (char v : x) cost += v ? raw.a_cost : raw.b_cost;
    CHECK(cost <= raw.budget + 1e-12);
    RawCnf same = raw;
    same.a_cost = 1;
    same.b_cost = 0;
    same.budget = 4;
    CHECK(satisfied_weight(normalize_budget(same), x) == doctest::Approx(best.value));
}

TEST_CASE("normalize_budget: the set-cover case passes through unchanged") {
    RawCnf raw;
    raw.n = 6;
    raw.a_cost = 1;
    raw.b_cost = 0;
    raw.budget = 2;
    raw.clauses = {{{0, 1}, {}, 3}, {{2}, {}, 1}, {{3, 4, 5}, {}, 2}};
    const CnfInstance inst = normalize_budget(raw);
    CHECK_FALSE(inst.complemented);
    REQUIRE(inst.clauses.size() == raw.clauses.size());
    for (std::size_t i = 0; i < raw.clauses.size(); ++i) {
        CHECK(inst.clauses[i].pos == raw.clauses[i].pos);
        CHECK(inst.clauses[i].neg.empty());
    }
    CHECK(brute_force_maxsat(inst).value == doctest::Approx(5));
}

TEST_CASE("lp_relax: single clause and a clause with its negation") {
    const LpRelaxation one = lp_relax(single({0}, {}, 4.0, 1, 1));
    REQUIRE(one.status == LpStatus::Optimal);
    CHECK(one.value == doctest::Approx(4.0));
    CHECK(one.y[0] == doctest::Approx(1.0));
    CHECK(one.z[0] == doctest::Approx(1.0));

    // z1 <= y and z2 <= 1 - y, so the two clauses share one unit of weight.
    CnfInstance both = single({0}, {}, 2.5, 1, 1);
    both.clauses.push_back({{}, {0}, 2.5});
    CHECK(lp_relax(both).value == doctest::Approx(2.5));
    CHECK(brute_force_maxsat(both).value == doctest::Approx(2.5));
}

TEST_CASE("lp_relax: feasible point and relaxation of the brute-force optimum") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 3 + static_cast<int>(seed % 10);
        const CnfInstance inst = gen_random_cnf(seed, n, 2 * n, 1 + static_cast<int>(seed % n));
        const LpRelaxation lp = lp_relax(inst);
        REQUIRE(lp.status == LpStatus::Optimal);
        double sy = 0;
        for (double y : lp.y) {
            CHECK(y >= -1e-9);
            CHECK(y <= 1 + 1e-9);
            sy += y;
        }
        CHECK(sy <= inst.k + 1e-9);
        double value = 0;
        for (std::size_t i = 0; i < inst.clauses.size(); ++i) {
            const Clause& c = inst.clauses[i];
            double lhs = 0;
            for (int v : c.pos) lhs += lp.y[v];
            for (int v : c.neg) lhs += 1 - lp.y[v];
            CHECK(lp.z[i] <= lhs + 1e-9);
            value += c.weight * lp.z[i];
        }
        CHECK(lp.value == doctest::Approx(value));
        CHECK(lp.value >= brute_force_maxsat(inst).value - 1e-9);
    }
}

TEST_CASE("brute_force_maxsat: small cases and an independent enumeration") {
    CHECK(brute_force_maxsat(single({0}, {}, 3, 2, 1)).value == doctest::Approx(3));
    CHECK(brute_force_maxsat(single({0}, {}, 3, 2, 0)).value == doctest::Approx(0));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 4 + static_cast<int>(seed % 8);
        CnfInstance inst = gen_random_cnf(100 + seed, n, 3 * n, static_cast<int>(seed % (n + 1)));
        CHECK(brute_force_maxsat(inst).value == doctest::Approx(enumerate_masks(inst)));
        const ExactResult r = brute_force_maxsat(inst);
        int trues = 0;
        for (char v : r.x) trues += v;
        CHECK(trues <= inst.k);
        CHECK(satisfied_weight(inst, r.x) == doctest::Approx(r.value));
        // k = n is the unbudgeted maximum.
        inst.k = n;
        CHECK(brute_force_maxsat(inst).value == doctest::Approx(enumerate_masks(inst)));
    }
    CnfInstance big;
    big.n = 21;
    big.k = 1;
    CHECK_THROWS(brute_force_maxsat(big));
}

TEST_CASE("round_scaled: zero point, Bernoulli frequency, feasibility flag") {
    CnfInstance inst = gen_random_cnf(3, 8, 10, 2);
    Rng rng(1);
    const RoundingDraw zero = round_scaled(inst, std::vector<double>(8, 0.0), 0.1, rng);
    CHECK(zero.trues == 0);
    CHECK(zero.feasible);

    const CnfInstance one = single({0}, {}, 1, 1, 1);
    const int T = 100000;
    int hits = 0;
    for (int t = 0; t < T; ++t) {
        Rng r = Rng::stream(5, t);
        hits += round_scaled(one, {1.0}, 0.1, r).x[0];
    }
    CHECK(std::fabs(hits / double(T) - 0.9) <= 4 * std::sqrt(0.09 / T));

    for (int t = 0; t < 2000; ++t) {
        Rng r = Rng::stream(6, t);
        const RoundingDraw d = round_scaled(inst, std::vector<double>(8, 0.5), 0.1, r);
        int trues = 0;
        for (char v : d.x) trues += v;
        CHECK(trues == d.trues);
        CHECK(d.feasible == (trues <= inst.k));
        CHECK(d.weight == doctest::Approx(satisfied_weight(inst, d.x)));
    }
}

TEST_CASE("round_scaled: per-clause satisfaction probability") {
    const double eps = 0.1;
    const CnfInstance inst = gen_random_cnf(21, 12, 30, 4);
    const LpRelaxation lp = lp_relax(inst);
    REQUIRE(lp.status == LpStatus::Optimal);
    const int T = 20000;
    std::vector<int> sat(inst.clauses.size(), 0);
    for (int t = 0; t < T; ++t) {
        Rng rng = Rng::stream(8, t);
        const RoundingDraw d = round_scaled(inst, lp.y, eps, rng);
        for (std::size_t i = 0; i < inst.clauses.size(); ++i) {
            CnfInstance one = inst;
            one.clauses = {inst.clauses[i]};
            sat[i] += satisfied_weight(one, d.x) > 0;
        }
    }
    for (std::size_t i = 0; i < inst.clauses.size(); ++i) {
        const double len = static_cast<double>(inst.clauses[i].pos.size() + inst.clauses[i].neg.size());
        const double target = (1 - std::pow(1 - 1 / len, len)) * (1 - eps) * lp.z[i];
        const double p = sat[i] / double(T);
        CHECK(p >= target - 4 * std::sqrt(std::max(p * (1 - p), 1.0 / T) / T));
    }
}

TEST_CASE("solve_maxsat: forced all-false, brute branch and rounding branch") {
    CnfInstance zero = gen_random_cnf(4, 6, 12, 0);
    const MaxSatResult z = solve_maxsat(zero, {});
    CHECK(z.value == doctest::Approx(satisfied_weight(zero, std::vector<char>(6, 0))));

    const CnfInstance small = gen_random_cnf(9, 10, 25, 2);
    MaxSatOptions opt;
    opt.epsilon = 0.5;
    const MaxSatResult b = solve_maxsat(small, opt);
    CHECK(b.method == "brute-force");
    CHECK(b.value == doctest::Approx(brute_force_maxsat(small).value));

    // k above 1/eps^3 = 8 with eps = 0.5 takes the rounding branch.
    const CnfInstance wide = gen_random_cnf(10, 40, 80, 12);
    opt.trials = 200;
    const MaxSatResult r = solve_maxsat(wide, opt);
    CHECK(r.method == "lp-rounding");
    CHECK(r.trials == 200);
    int trues = 0;
    for (char v : r.x) trues += v;
    CHECK(trues <= wide.k);
    CHECK(r.value <= r.lp_value + 1e-9);
    CHECK(r.value == doctest::Approx(satisfied_weight(wide, r.x)));
    CHECK(solve_maxsat(wide, opt).x == r.x);

    MaxSatOptions tight;
    tight.epsilon = 0.1;
    tight.brute_max_n = 25;
    CHECK_THROWS(solve_maxsat(gen_random_cnf(1, 30, 10, 3), tight));
    CHECK_THROWS(solve_maxsat(small, MaxSatOptions{0.0, 10, 1, 25}));
}

TEST_CASE("solve_maxsat: mean rounded weight against the LP baseline") {
    const double eps = 0.1;
    const double factor = 1 - 1 / std::exp(1.0) - eps;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CnfInstance inst = gen_random_cnf(300 + seed, 12, 30, 3);
        const LpRelaxation lp = lp_relax(inst);
        REQUIRE(lp.status == LpStatus::Optimal);
        const int T = 4000;
        double s = 0, s2 = 0;
        for (int t = 0; t < T; ++t) {
            Rng rng = Rng::stream(seed, t);
            const double w = round_scaled(inst, lp.y, eps, rng).weight;
            s += w;
            s2 += w * w;
        }
        const double mean = s / T, se = std::sqrt(std::max(0.0, s2 / T - mean * mean) / T);
        CHECK(mean >= factor * lp.value - 3 * se);
    }
}

TEST_CASE("violation_frequency: k >= 1/eps^3 stays under the tail bound") {
    const double eps = 0.1;
    const int n = 2000, k = 1000;
    Rng rng(12);
    std::vector<double> y(n);
    double sum = 0;
    for (double& v : y) sum += v = rng.uniform();
    for (double& v : y) v *= k / sum;
    for (double v : y) REQUIRE(v <= 1.0);
    const Frequency f = violation_frequency(y, k, eps, 5000, 3);
    const double bound = violation_bound(eps);
    CHECK(bound == doctest::Approx(std::exp(-3.0)));
    CHECK(f.freq <= bound + 3 * std::sqrt(bound * (1 - bound) / 5000));
    CHECK_THROWS(violation_frequency(y, k, eps, 0, 1));
}
