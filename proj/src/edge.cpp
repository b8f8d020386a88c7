#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kmr/bipoint.hpp"

namespace kmr {

namespace {

std::size_t ceil_count(double x) { return static_cast<std::size_t>(std::max(0.0, std::ceil(x - 1e-9))); }

// Per client: nearest F1 distance, nearest F2 facility and its distance (lowest id on ties).
struct NearestPair {
    std::vector<double> d1, d2;
    std::vector<int> i2;
};

NearestPair nearest_pairs(const Instance& inst, const StarDecomposition& dec) {
    NearestPair np;
    const int nc = inst.nc();
    np.d1.assign(nc, std::numeric_limits<double>::infinity());
    np.d2.assign(nc, std::numeric_limits<double>::infinity());
    np.i2.assign(nc, -1);
    for (int j = 0; j < nc; ++j) {
        for (int i : dec.f1) np.d1[j] = std::min(np.d1[j], inst.fc(i, j));
        for (int i : dec.f2) {
            const double d = inst.fc(i, j);
            if (d < np.d2[j]) {
                np.d2[j] = d;
                np.i2[j] = i;
            }
        }
    }
    return np;
}

PseudoSolution best_of(std::vector<PseudoSolution> runs) {
    std::size_t best = 0;
    std::vector<std::pair<std::string, double>> table;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        table.emplace_back(runs[i].provenance, runs[i].connection_cost);
        if (runs[i].connection_cost < runs[best].connection_cost) best = i;
    }
    PseudoSolution out = std::move(runs[best]);
    out.candidates = std::move(table);
    return out;
}

// Expected facility count of one run of A under `params` plus the per-line ceiling
// slack; used for the dichotomy cases that replace Round2Stars.
int dichotomy_cap(const StarDecomposition& dec, const RoundingParams& params) {
    const double e = params.p0 * dec.n_c0() + (params.p1A + params.q1A) * dec.n_c1a() +
                     (params.p1B + params.q1B) * dec.n_c1b() + params.p2 * dec.n_c2() + params.q2 * dec.n_l2();
    return static_cast<int>(std::floor(e + 6 + 1e-9));
}

}  // namespace

PseudoSolution knapsack_close_centers(const Instance& inst, const StarDecomposition& dec, Rng& rng) {
    const NearestPair np = nearest_pairs(inst, dec);
    std::vector<double> value(dec.stars.size(), 0.0);
    for (int j = 0; j < inst.nc(); ++j) {
        const int s = dec.star_of_facility[np.i2[j]];
        if (dec.kind[s] == StarKind::T2) value[s] += np.d1[j] + np.d2[j];
    }

    std::vector<int> open;
    for (int s : dec.t1) open.push_back(dec.stars[s].leaves.front());
    const int n_l1 = static_cast<int>(open.size());
    double budget = std::max(0, dec.k - n_l1 - dec.n_c2());

    // Greedy by value per unit weight solves the knapsack LP with at most one fractional item.
    std::vector<int> items = dec.t2;
    std::stable_sort(items.begin(), items.end(), [&](int x, int y) {
        return value[x] / (dec.stars[x].size() - 1.0) > value[y] / (dec.stars[y].size() - 1.0);
    });
    std::vector<double> x(dec.stars.size(), 0.0);
    for (int s : items) {
        const double w = static_cast<double>(dec.stars[s].size()) - 1.0;
        if (budget <= 0) break;
        if (w <= budget + 1e-12) {
            x[s] = 1.0;
            budget -= w;
        } else {
            x[s] = budget / w;
            budget = 0;
        }
    }
    for (int s : dec.t2) {
        const Star& st = dec.stars[s];
        if (x[s] >= 1.0) {
            open.insert(open.end(), st.leaves.begin(), st.leaves.end());
        } else {
            open.push_back(st.center);
            if (x[s] > 0.0)
                for (int f : rng.sample(st.leaves, ceil_count(x[s] * static_cast<double>(st.size())))) open.push_back(f);
        }
    }
    return make_pseudo(inst, std::move(open), dec.k, dec.k + 2, "knapsack");
}

PseudoSolution savings_open_f1(const Instance& inst, const StarDecomposition& dec) {
    const NearestPair np = nearest_pairs(inst, dec);
    std::vector<double> saving(inst.nf(), 0.0);
    for (int j = 0; j < inst.nc(); ++j) saving[np.i2[j]] += std::max(0.0, np.d1[j] - np.d2[j]);

    std::vector<int> leaves = dec.l2_leaves();
    std::stable_sort(leaves.begin(), leaves.end(), [&](int x, int y) { return saving[x] > saving[y]; });
    const std::size_t n = std::min(leaves.size(), ceil_count(0.5 * dec.b * dec.s0 * static_cast<double>(leaves.size())));
    std::vector<int> open = dec.f1;
    open.insert(open.end(), leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(n));
    return make_pseudo(inst, std::move(open), dec.k, dec.k + 1, "savings");
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::DeltaZero: return "delta-zero";
        case Regime::SmallB: return "small-b";
        case Regime::LargeB: return "large-b";
        case Regime::Band: return "band";
        case Regime::SmallS0: return "small-s0";
        case Regime::R1: return "r1";
        case Regime::Main: return "main";
    }
    return "?";
}

Regime classify_regime(const StarDecomposition* dec) {
    if (!dec) return Regime::DeltaZero;
    const double b = dec->b, rd = dec->r_d;
    if (b <= 0.25) return Regime::SmallB;
    if (b >= 5.0 / 6.0) return Regime::LargeB;
    if (b < 0.508 || b > 0.75 || rd < 19.0 / 40.0 || rd > 2.0 / 3.0) return Regime::Band;
    if (dec->s0 < 5.0 / 6.0) return Regime::SmallS0;
    if (dec->r1 <= 1.0) return Regime::R1;
    return Regime::Main;
}

DispatchResult edge_dispatch(const Instance& inst, const BiPointSolution& bp, double eta, std::uint64_t seed) {
    const std::optional<StarDecomposition> dec = decompose_stars(inst, bp);
    DispatchResult out;
    out.regime = classify_regime(dec ? &*dec : nullptr);
    switch (out.regime) {
        case Regime::DeltaZero:
            out.solution = make_pseudo(inst, bp.f2, inst.k, inst.k, "F2");
            break;
        case Regime::SmallB:
            out.solution = make_pseudo(inst, dec->f1, inst.k, inst.k, "F1");
            break;
        case Regime::LargeB: {
            Rng rng = Rng::stream(seed, 0);
            out.solution = knapsack_close_centers(inst, *dec, rng);
            break;
        }
        case Regime::Band: {
            Rng rng = Rng::stream(seed, 1);
            const RoundingParams ls = li_svensson_params(dec->b, eta);
            out.solution = best_of({make_pseudo(inst, dec->f1, inst.k, inst.k, "F1"), algorithm_A(inst, *dec, ls, rng)});
            break;
        }
        case Regime::SmallS0: {
            Rng r0 = Rng::stream(seed, 0), r1 = Rng::stream(seed, 1);
            const RoundingParams ls = li_svensson_params(dec->b, eta);
            out.solution = best_of(
                {knapsack_close_centers(inst, *dec, r0), savings_open_f1(inst, *dec), algorithm_A(inst, *dec, ls, r1)});
            break;
        }
        case Regime::R1:
            out.solution = run_r1_case(inst, *dec, eta, seed);
            break;
        case Regime::Main:
            out.solution = run_main_case(inst, *dec, eta, seed);
            break;
    }
    return out;
}

DichotomyThresholds dichotomy_thresholds(double eta, double beta, double c0, double c1) {
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("eta must lie in (0,1)");
    if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
    DichotomyThresholds t;
    t.c0 = c0;
    t.c1 = c1;
    t.f = 3.0 * c0 / (eta * eta * eta * (1.0 - eta) * beta) * std::log(1.0 / (eta * eta));
    t.g = 2.0 / eta * t.f;
    return t;
}

DichotomyOutcome dichotomy_open(const StarDecomposition& dec, const RoundingParams& params, Rng& rng,
                                int max_attempts) {
    params.check();
    if (!params.uses_round2stars()) throw std::invalid_argument("dichotomy needs p2 in (0,1)");
    if (max_attempts < 1) throw std::invalid_argument("max_attempts must be positive");
    DichotomyOutcome out;
    out.thresholds = dichotomy_thresholds(params.eta, params.beta());
    const double eta = params.eta, q2 = params.q2, c0 = out.thresholds.c0;

    // Lines 1-3 of A: the same draws as algorithm_a_open with the 2-stars left out.
    RoundingParams no2 = params;
    no2.p2 = 0;
    no2.q2 = 0;
    std::vector<int> base;
    {
        StarDecomposition head = dec;
        head.t2.clear();
        base = algorithm_a_open(head, no2, rng);
    }

    std::vector<int> small, large;
    for (int s : dec.t2) (static_cast<double>(dec.stars[s].size()) <= c0 / eta ? small : large).push_back(s);
    std::vector<int> large_leaves;
    for (int s : large) large_leaves.insert(large_leaves.end(), dec.stars[s].leaves.begin(), dec.stars[s].leaves.end());
    double small_leaves = 0;
    for (int s : small) small_leaves += static_cast<double>(dec.stars[s].size());

    std::vector<int> open = base;
    if (static_cast<double>(small.size()) > out.thresholds.f) {
        out.which = 1;
        for (int s : large) open.push_back(dec.stars[s].center);
        const double extra = q2 * (static_cast<double>(large_leaves.size()) - static_cast<double>(large.size()));
        for (int f : rng.sample(large_leaves, ceil_count(extra))) open.push_back(f);
        out.small_budget = params.p2 * static_cast<double>(small.size()) + q2 * small_leaves;
        std::vector<int> picked;
        for (out.attempts = 1;; ++out.attempts) {
            picked.clear();
            for (int s : small) {
                const Star& st = dec.stars[s];
                if (rng.bernoulli((1.0 - eta) * q2)) picked.insert(picked.end(), st.leaves.begin(), st.leaves.end());
                else picked.push_back(st.center);
            }
            out.small_opened = static_cast<int>(picked.size());
            out.budget_violated = out.small_opened > out.small_budget + 1e-9;
            if (!out.budget_violated || out.attempts >= max_attempts) break;
        }
        open.insert(open.end(), picked.begin(), picked.end());
    } else if (static_cast<double>(dec.n_l2()) <= out.thresholds.g) {
        out.which = 2;
        open = dec.f2;
    } else {
        out.which = 3;
        for (int s : dec.t2) open.push_back(dec.stars[s].center);
        const double scaled = q2 * (1.0 - out.thresholds.c1 * eta) * static_cast<double>(large_leaves.size());
        for (int f : rng.sample(large_leaves, ceil_count(scaled))) open.push_back(f);
    }
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    out.open_set = std::move(open);
    return out;
}

PseudoSolution dichotomy_round(const Instance& inst, const StarDecomposition& dec, const RoundingParams& params,
                               Rng& rng, DichotomyOutcome* report) {
    DichotomyOutcome d = dichotomy_open(dec, params, rng);
    const int cap = d.which == 2 ? static_cast<int>(dec.f2.size()) : dichotomy_cap(dec, params);
    PseudoSolution ps = make_pseudo(inst, d.open_set, dec.k, cap, "dichotomy-case" + std::to_string(d.which));
    if (report) *report = std::move(d);
    return ps;
}

}  // namespace kmr
