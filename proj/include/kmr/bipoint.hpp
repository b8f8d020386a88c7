#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmr/core.hpp"
#include "kmr/nlp.hpp"
#include "kmr/rng.hpp"

namespace kmr {

struct Star {
    int center = -1;          // facility index in F1
    std::vector<int> leaves;  // facility indices in F2
    std::size_t size() const { return leaves.size(); }
};

struct StarDecomposition {
    int k = 0;
    double a = 1, b = 0, d1 = 0, d2 = 0;
    std::vector<int> f1, f2;  // sorted facility indices
    std::vector<Star> stars;  // one per F1 facility, same order as f1
    std::vector<int> star_of_facility;  // facility -> star holding it as a leaf, -1 if none
    std::vector<int> center_star;       // facility -> star it is the center of, -1 if none
    std::vector<StarKind> kind;         // per star: C0, T1A, T1B or T2
    std::vector<int> t0, t1, t2, t1a, t1b;  // star indices; t1a and t1b in decreasing g_i order
    std::vector<double> g_star;  // g_i per star (1-stars only, NaN elsewhere)

    int delta_f = 0;
    double r_d = 0, r0 = 0, r1 = 0, r2 = 0, s0 = 1;
    double g = 0;  // min g_i over T1A, +infinity when T1A is empty

    int n_c0() const { return static_cast<int>(t0.size()); }
    int n_c1() const { return static_cast<int>(t1.size()); }
    int n_c1a() const { return static_cast<int>(t1a.size()); }
    int n_c1b() const { return static_cast<int>(t1b.size()); }
    int n_c2() const { return static_cast<int>(t2.size()); }
    int n_l1() const { return n_c1(); }
    int n_l2() const;
    std::vector<int> l2_leaves() const;  // sorted
};

// Star decomposition of a bi-point solution; nullopt when Delta_F = 0 (the caller returns F2).
std::optional<StarDecomposition> decompose_stars(const Instance& inst, const BiPointSolution& bp);

struct ClientGeometry {
    int client = -1;
    int i1 = -1, i2 = -1, i3 = -1;
    std::optional<int> i0, i4, i5;
    double d1 = 0, d2 = 0;
    StarKind x = StarKind::C0, y = StarKind::T2;
    Sign sign = Sign::P;
    std::string class_name() const;
};

ClientGeometry classify_client(const Instance& inst, const StarDecomposition& dec, int client);

struct RoundingParams {
    double p0 = 0, p1A = 0, q1A = 0, p1B = 0, q1B = 0, p2 = 0, q2 = 0;
    double eta = 0.05;
    std::string label;

    double beta() const { return std::min(q2, 1.0 - q2); }
    int c() const;
    double p(StarKind x) const;
    double q(StarKind y) const;
    bool uses_round2stars() const { return p2 > 0.0 && p2 < 1.0; }
    void check() const;
};

// Table 1 rows A1..A9 and Table 2 rows A1'..A10' for the given scalars.
std::array<RoundingParams, 9> table1(double b, double s0, double eta);
std::array<RoundingParams, 10> table2(double b, double s0, double eta);
RoundingParams li_svensson_params(double b, double eta);

struct PseudoSolution {
    std::vector<int> open_set;  // sorted, distinct
    double connection_cost = 0;
    int extra = 0;  // |open_set| - k
    int cap = 0;    // facility count allowed for this provenance
    std::string provenance;
    std::vector<std::pair<std::string, double>> candidates;  // per-algorithm cost table of a best-of run
};

PseudoSolution make_pseudo(const Instance& inst, std::vector<int> open_set, int k, int cap, std::string provenance);

// Explicit facility cap of one run of A: floor(E + slack) where slack counts the
// ceilings of lines 1-3 and 5 and, under Round2Stars, one for the large stars
// plus c + 2 per nonempty small-star group.
struct FacilityCap {
    double expected = 0;  // E
    double slack = 0;
    int groups = 0;
    int cap = 0;
};
FacilityCap algorithm_a_cap(const StarDecomposition& dec, const RoundingParams& params);

struct Round2StarsStats {
    int groups = 0;        // nonempty small-star groups
    int large_stars = 0;
    std::vector<std::pair<int, int>> group_opened;  // (opened, cap from the group lemma) per nonempty group
};

// Opens facilities among the 2-stars; appends to `open`.
void round2stars(const StarDecomposition& dec, const RoundingParams& params, Rng& rng, std::vector<int>& open,
                 Round2StarsStats* stats = nullptr);

std::vector<int> algorithm_a_open(const StarDecomposition& dec, const RoundingParams& params, Rng& rng,
                                  Round2StarsStats* stats = nullptr);
PseudoSolution algorithm_A(const Instance& inst, const StarDecomposition& dec, const RoundingParams& params, Rng& rng);

// Best-of runs; each algorithm draws from its own stream of `seed`.
PseudoSolution run_main_case(const Instance& inst, const StarDecomposition& dec, double eta, std::uint64_t seed);
PseudoSolution run_r1_case(const Instance& inst, const StarDecomposition& dec, double eta, std::uint64_t seed);

PseudoSolution knapsack_close_centers(const Instance& inst, const StarDecomposition& dec, Rng& rng);
PseudoSolution savings_open_f1(const Instance& inst, const StarDecomposition& dec);

enum class Regime { DeltaZero, SmallB, LargeB, Band, SmallS0, R1, Main };
const char* regime_name(Regime r);
Regime classify_regime(const StarDecomposition* dec);

struct DispatchResult {
    Regime regime = Regime::Main;
    PseudoSolution solution;
};

DispatchResult edge_dispatch(const Instance& inst, const BiPointSolution& bp, double eta, std::uint64_t seed);

struct DichotomyThresholds {
    double c0 = 2, c1 = 1;
    double f = 0, g = 0;
};
DichotomyThresholds dichotomy_thresholds(double eta, double beta, double c0 = 2, double c1 = 1);

struct DichotomyOutcome {
    int which = 0;  // 1, 2 or 3
    std::vector<int> open_set;
    bool budget_violated = false;  // Case 1: small stars exceeded p2|C2''| + q2|L2''|
    int attempts = 1;
    int small_opened = 0;
    double small_budget = 0;
    DichotomyThresholds thresholds;
};

// Lines 1-3 of A followed by the three-way case split for the 2-stars.
// Case 1 resamples up to `max_attempts` times while the small-star budget is violated.
DichotomyOutcome dichotomy_open(const StarDecomposition& dec, const RoundingParams& params, Rng& rng,
                                int max_attempts = 1);
PseudoSolution dichotomy_round(const Instance& inst, const StarDecomposition& dec, const RoundingParams& params,
                               Rng& rng, DichotomyOutcome* report = nullptr);

struct CostBounds {
    std::optional<double> c213, c123, c210, c120, c145;
    double best() const;
};

// Per-client bounds with the probability surrogates 1-p_X, (1+eta)(1-q_Y) and (1+eta)(1-p_X)(1-q_Y).
CostBounds cost_bound(const ClientGeometry& j, const RoundingParams& params, double g);

// Euclidean instance with a bi-point solution in the main regime, built by rejection sampling.
struct RegimeInstance {
    Instance inst;
    BiPointSolution bp;
    int rejected = 0;
};
RegimeInstance synth_regime_instance(std::uint64_t seed);

}  // namespace kmr
