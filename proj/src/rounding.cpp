#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "kmr/bipoint.hpp"
#include "kmr/depround.hpp"

namespace kmr {

namespace {

// Ceiling that ignores floating noise just above an integer.
std::size_t ceil_count(double x) { return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9))); }

bool is_endpoint(double p) { return p <= 1e-12 || p >= 1.0 - 1e-12; }

RoundingParams row(double p0, double p1A, double q1A, double p1B, double q1B, double p2, double q2, double eta,
                   std::string label) {
    auto c = [](double v) { return std::clamp(v, 0.0, 1.0); };
    return {c(p0), c(p1A), c(q1A), c(p1B), c(q1B), c(p2), c(q2), eta, std::move(label)};
}

std::vector<int> centers_of(const StarDecomposition& dec, const std::vector<int>& stars) {
    std::vector<int> out;
    out.reserve(stars.size());
    for (int s : stars) out.push_back(dec.stars[s].center);
    return out;
}

bool is_large(const StarDecomposition& dec, int s, const RoundingParams& params) {
    return static_cast<double>(dec.stars[s].size()) >= 1.0 / (params.p2 * params.eta);
}

// Largest s with (1+beta)^s <= n.
int size_band(std::size_t n, double beta) {
    int s = static_cast<int>(std::floor(std::log(static_cast<double>(n)) / std::log1p(beta)));
    while (std::pow(1.0 + beta, s + 1) <= static_cast<double>(n)) ++s;
    while (s > 0 && std::pow(1.0 + beta, s) > static_cast<double>(n)) --s;
    return s;
}

// Small 2-stars grouped by size band, bands ascending and stars in center order.
std::map<int, std::vector<int>> small_groups(const StarDecomposition& dec, const RoundingParams& params) {
    std::map<int, std::vector<int>> groups;
    const double beta = params.beta();
    for (int s : dec.t2)
        if (!is_large(dec, s, params)) groups[size_band(dec.stars[s].size(), beta)].push_back(s);
    return groups;
}

}  // namespace

int RoundingParams::c() const {
    const double b = beta();
    if (!(b > 0)) throw std::invalid_argument("c is undefined for beta = 0");
    return static_cast<int>(std::ceil(16.0 / (3.0 * b * b) - 1e-9));
}

double RoundingParams::p(StarKind x) const {
    switch (x) {
        case StarKind::C0: return p0;
        case StarKind::T1A: return p1A;
        case StarKind::T1B: return p1B;
        case StarKind::T2: return p2;
    }
    return 0;
}

double RoundingParams::q(StarKind y) const {
    switch (y) {
        case StarKind::C0: return 0;
        case StarKind::T1A: return q1A;
        case StarKind::T1B: return q1B;
        case StarKind::T2: return q2;
    }
    return 0;
}

void RoundingParams::check() const {
    for (double v : {p0, p1A, q1A, p1B, q1B, p2, q2})
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("rounding parameters must lie in [0,1]");
    if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
    if (uses_round2stars()) {
        if (std::fabs(p2 + q2 - 1.0) > 1e-9) throw std::invalid_argument("Round2Stars needs p2 + q2 = 1");
        if (!(beta() > 0)) throw std::invalid_argument("Round2Stars needs q2 in (0,1)");
    }
}

std::array<RoundingParams, 9> table1(double b, double s0, double eta) {
    const double a = 1.0 - b;
    return {{
        row(0, 0, 1, 0, 1, a * s0, 1 - a * s0, eta, "A1"),
        row(1, 0, 1, 0, 1, 1 - b * s0, b * s0, eta, "A2"),
        row(1, 0, 1, 1, 0, 1 - b * s0, b * s0, eta, "A3"),
        row(1, 1, 0, 0, 1, 1 - b * s0, b * s0, eta, "A4"),
        row(1, 1, 0, 1, 0, 1 - b * s0, b * s0, eta, "A5"),
        row(1, 1, 1, 1, 0, 1 - (b - a) * s0, (b - a) * s0, eta, "A6"),
        row(1, 1, 0, 1, 0, 1, 0.5 * b * s0, eta, "A7"),
        row(0, 0, 0, 0, 1, 0, 1, eta, "A8"),
        row(a, a, b, a, b, a, b, eta, "A9"),
    }};
}

std::array<RoundingParams, 10> table2(double b, double s0, double eta) {
    const double a = 1.0 - b;
    return {{
        row(0, 0, 1, 0, 1, a * s0, 1 - a * s0, eta, "A1'"),
        row(0, 1, 0, 1, 0, a * s0, 1 - a * s0, eta, "A2'"),
        row(0, 0, 1, 0, 1, 1, (1 - a * s0) / 2, eta, "A3'"),
        row(0, 1, 0, 1, 0, 1, (1 - a * s0) / 2, eta, "A4'"),
        row(1, 0, 1, 0, 1, 1, b * s0 / 2, eta, "A5'"),
        row(1, 1, 0, 1, 0, 1, b * s0 / 2, eta, "A6'"),
        row(1, 0, 1, 0, 1, 1 - b * s0, b * s0, eta, "A7'"),
        row(1, 1, 0, 1, 0, 1 - b * s0, b * s0, eta, "A8'"),
        row(1, 1, b, 1, b, 1, 0, eta, "A9'"),
        row(1, b, 1, b, 1, 1, 0, eta, "A10'"),
    }};
}

RoundingParams li_svensson_params(double b, double eta) {
    const double a = 1.0 - b;
    return row(a, a, b, a, b, a, b, eta, "A(a,a,b,a,b,a,b)");
}

PseudoSolution make_pseudo(const Instance& inst, std::vector<int> open_set, int k, int cap, std::string provenance) {
    std::sort(open_set.begin(), open_set.end());
    open_set.erase(std::unique(open_set.begin(), open_set.end()), open_set.end());
    PseudoSolution ps;
    ps.connection_cost = open_set.empty() ? (inst.nc() == 0 ? 0.0 : std::numeric_limits<double>::infinity())
                                          : connection_cost(inst, open_set);
    ps.extra = static_cast<int>(open_set.size()) - k;
    ps.open_set = std::move(open_set);
    ps.cap = cap;
    ps.provenance = std::move(provenance);
    return ps;
}

FacilityCap algorithm_a_cap(const StarDecomposition& dec, const RoundingParams& params) {
    FacilityCap fc;
    fc.expected = params.p0 * dec.n_c0() + (params.p1A + params.q1A) * dec.n_c1a() +
                  (params.p1B + params.q1B) * dec.n_c1b() + params.p2 * dec.n_c2() + params.q2 * dec.n_l2();
    fc.slack = 1 + 2 + 2;
    if (params.uses_round2stars()) {
        fc.groups = static_cast<int>(small_groups(dec, params).size());
        fc.slack += 1 + fc.groups * (params.c() + 2);
    } else {
        fc.slack += 1;
    }
    fc.cap = static_cast<int>(std::floor(fc.expected + fc.slack + 1e-9));
    return fc;
}

void round2stars(const StarDecomposition& dec, const RoundingParams& params, Rng& rng, std::vector<int>& open,
                 Round2StarsStats* stats) {
    params.check();
    if (!params.uses_round2stars()) throw std::invalid_argument("Round2Stars needs p2 in (0,1)");
    const double q2 = params.q2;

    std::vector<int> large_leaves;
    int n_large = 0;
    for (int s : dec.t2) {
        if (!is_large(dec, s, params)) continue;
        ++n_large;
        open.push_back(dec.stars[s].center);
        large_leaves.insert(large_leaves.end(), dec.stars[s].leaves.begin(), dec.stars[s].leaves.end());
    }
    const double extra_leaves = q2 * (static_cast<double>(large_leaves.size()) - n_large);
    for (int f : rng.sample(large_leaves, ceil_count(extra_leaves))) open.push_back(f);
    if (stats) stats->large_stars = n_large;

    const int c = params.c();
    for (const auto& [band, members] : small_groups(dec, params)) {
        (void)band;
        RoundingInput in;
        double n_leaves = 0;
        for (int s : members) {
            in.p.push_back(q2);
            in.a.push_back(static_cast<double>(dec.stars[s].size()) - 1.0);
            n_leaves += static_cast<double>(dec.stars[s].size());
        }
        const RoundingOutcome out = dep_round(in, rng);
        std::vector<int> opened;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const Star& st = dec.stars[members[i]];
            if (out.fractional_index && *out.fractional_index == i) {
                opened.push_back(st.center);
                for (int f : rng.sample(st.leaves, ceil_count(out.x[i] * static_cast<double>(st.size()))))
                    opened.push_back(f);
            } else if (out.x[i] >= 0.5) {
                opened.insert(opened.end(), st.leaves.begin(), st.leaves.end());
            } else {
                opened.push_back(st.center);
            }
        }
        const std::vector<int> group_centers = centers_of(dec, members);
        for (int f : rng.sample(group_centers, std::min<std::size_t>(c, group_centers.size()))) opened.push_back(f);

        if (stats) {
            std::vector<int> distinct = opened;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            const double budget = params.p2 * static_cast<double>(members.size()) + q2 * n_leaves + c + 2;
            stats->group_opened.emplace_back(static_cast<int>(distinct.size()),
                                             static_cast<int>(std::floor(budget + 1e-9)));
            ++stats->groups;
        }
        open.insert(open.end(), opened.begin(), opened.end());
    }
}

std::vector<int> algorithm_a_open(const StarDecomposition& dec, const RoundingParams& params, Rng& rng,
                                  Round2StarsStats* stats) {
    params.check();
    std::vector<int> open;
    for (int f : rng.sample(centers_of(dec, dec.t0), ceil_count(params.p0 * dec.n_c0()))) open.push_back(f);

    // Centers of a permutation prefix and leaves of a suffix.
    auto one_stars = [&](const std::vector<int>& stars, double p, double q) {
        std::vector<int> perm = stars;
        rng.shuffle(perm);
        const std::size_t n = perm.size();
        const std::size_t np = std::min(n, ceil_count(p * static_cast<double>(n)));
        const std::size_t nq = std::min(n, ceil_count(q * static_cast<double>(n)));
        for (std::size_t i = 0; i < np; ++i) open.push_back(dec.stars[perm[i]].center);
        for (std::size_t i = n - nq; i < n; ++i) open.push_back(dec.stars[perm[i]].leaves.front());
    };
    one_stars(dec.t1a, params.p1A, params.q1A);
    one_stars(dec.t1b, params.p1B, params.q1B);

    if (is_endpoint(params.p2)) {
        if (params.p2 >= 0.5)
            for (int s : dec.t2) open.push_back(dec.stars[s].center);
        const std::vector<int> l2 = dec.l2_leaves();
        for (int f : rng.sample(l2, ceil_count(params.q2 * static_cast<double>(l2.size())))) open.push_back(f);
    } else {
        round2stars(dec, params, rng, open, stats);
    }
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    return open;
}

PseudoSolution algorithm_A(const Instance& inst, const StarDecomposition& dec, const RoundingParams& params, Rng& rng) {
    std::vector<int> open = algorithm_a_open(dec, params, rng);
    return make_pseudo(inst, std::move(open), dec.k, algorithm_a_cap(dec, params).cap, params.label);
}

namespace {

template <std::size_t N>
PseudoSolution best_of_rows(const Instance& inst, const StarDecomposition& dec,
                            const std::array<RoundingParams, N>& rows, std::uint64_t seed) {
    PseudoSolution best;
    std::vector<std::pair<std::string, double>> table;
    for (std::size_t i = 0; i < N; ++i) {
        Rng rng = Rng::stream(seed, i);
        PseudoSolution ps = algorithm_A(inst, dec, rows[i], rng);
        table.emplace_back(ps.provenance, ps.connection_cost);
        if (i == 0 || ps.connection_cost < best.connection_cost) best = std::move(ps);
    }
    best.candidates = std::move(table);
    return best;
}

}  // namespace

PseudoSolution run_main_case(const Instance& inst, const StarDecomposition& dec, double eta, std::uint64_t seed) {
    if (classify_regime(&dec) != Regime::Main)
        throw std::invalid_argument(fmt::format("decomposition is not in the main regime ({})",
                                                regime_name(classify_regime(&dec))));
    return best_of_rows(inst, dec, table1(dec.b, dec.s0, eta), seed);
}

PseudoSolution run_r1_case(const Instance& inst, const StarDecomposition& dec, double eta, std::uint64_t seed) {
    if (classify_regime(&dec) != Regime::R1)
        throw std::invalid_argument(fmt::format("decomposition is not in the r1 <= 1 regime ({})",
                                                regime_name(classify_regime(&dec))));
    return best_of_rows(inst, dec, table2(dec.b, dec.s0, eta), seed);
}

}  // namespace kmr
