#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmr/lp.hpp"
#include "kmr/rng.hpp"

namespace kmr {

// Zero-based variable indices; a clause is satisfied when some variable in
// `pos` is true or some variable in `neg` is false.
struct Clause {
    std::vector<int> pos, neg;
    double weight = 1;
};

// Formula as read from a file: setting x_j true costs a_cost, false costs b_cost,
// and the total cost may not exceed `budget`.
struct RawCnf {
    int n = 0;
    std::vector<Clause> clauses;
    double a_cost = 1, b_cost = 0, budget = 0;
};

// Formula with a cardinality budget: at most k variables true.
struct CnfInstance {
    int n = 0;
    std::vector<Clause> clauses;
    int k = 0;
    bool complemented = false;  // variables are the complements of the raw ones
    void check() const;
};

// Orients the costs so that true is the expensive value and derives
// k = floor((B - n b) / (a - b)), capped at n. Throws when no assignment fits the budget.
CnfInstance normalize_budget(const RawCnf& raw);
// Maps an assignment of the normalized instance back to the raw variables.
std::vector<char> to_raw_assignment(const CnfInstance& inst, std::vector<char> x);

double satisfied_weight(const CnfInstance& inst, const std::vector<char>& x);
double total_weight(const CnfInstance& inst);

struct LpRelaxation {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> y, z;
    double value = 0;
};

LpRelaxation lp_relax(const CnfInstance& inst);

struct RoundingDraw {
    std::vector<char> x;
    int trues = 0;
    bool feasible = true;
    double weight = 0;
};

// Sets each x_j true independently with probability (1 - eps) y_j.
RoundingDraw round_scaled(const CnfInstance& inst, const std::vector<double>& y, double eps, Rng& rng);

struct ExactResult {
    std::vector<char> x;
    double value = 0;
};

// Exhaustive search over assignments with at most k trues (n <= 20).
ExactResult brute_force_maxsat(const CnfInstance& inst);

struct MaxSatOptions {
    double epsilon = 0.1;
    int trials = 1000;
    std::uint64_t seed = 1;
    int brute_max_n = 25;
};

struct MaxSatResult {
    std::string method;  // "brute-force" or "lp-rounding"
    std::vector<char> x;
    double value = 0;
    double lp_value = 0;  // only for lp-rounding
    int trials = 0;
    int feasible_trials = 0;
    double mean_weight = 0;  // over all draws, feasible or not
};

// Brute force when k <= 1/eps^3, otherwise the best feasible draw of scaled rounding.
MaxSatResult solve_maxsat(const CnfInstance& inst, const MaxSatOptions& opt);

struct Frequency {
    double freq = 0, stderr_ = 0;
    std::uint64_t trials = 0;
};

// Fraction of single draws of scaled rounding that set more than k variables true.
Frequency violation_frequency(const std::vector<double>& y, int k, double eps, std::uint64_t trials, std::uint64_t seed);
double violation_bound(double eps);

// Random instance: clauses of 1..max_len distinct literals with weights in [1, 10].
CnfInstance gen_random_cnf(std::uint64_t seed, int n, int m, int k, int max_len = 3);

}  // namespace kmr
