#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmr/rng.hpp"

namespace kmr {

inline constexpr double kSnap = 1e-12;

struct RoundingInput {
    std::vector<double> p;  // marginals in [0,1]
    std::vector<double> a;  // positive weights
    std::size_t n() const { return p.size(); }
    void check() const;
    static RoundingInput unit(std::vector<double> p);
};

struct RoundingOutcome {
    std::vector<double> x;
    std::optional<std::size_t> fractional_index;
};

enum class SimplifyCase { I, II, III, IV };

// One possible result of a Simplify call together with its probability.
struct SimplifyBranch {
    double prob;
    double gamma1, gamma2;
};

struct SimplifyBranches {
    SimplifyCase which;
    std::array<SimplifyBranch, 2> branch;
};

// The two possible outcomes of Simplify(a1,a2,beta1,beta2); requires beta in (0,1).
SimplifyBranches simplify_branches(double a1, double a2, double beta1, double beta2);
std::pair<double, double> simplify(double a1, double a2, double beta1, double beta2, Rng& rng);

// Snaps values within kSnap of 0 or 1 onto the boundary.
double snap01(double v);
inline bool is_fractional(double v) { return v > 0.0 && v < 1.0; }

struct DepRoundStats {
    std::size_t simplify_calls = 0;
};

RoundingOutcome dep_round(const RoundingInput& input, Rng& rng, DepRoundStats* stats = nullptr);

enum class ResolvePolicy { Down, Up, Bernoulli, Keep };
ResolvePolicy parse_policy(const std::string& s);
std::vector<double> resolve_fractional(const RoundingOutcome& outcome, ResolvePolicy policy, Rng& rng);

struct BoundBracket {
    double lower = 1, upper = 1;
};

BoundBracket bound_general(double n, double t, double alpha);
BoundBracket bound_uniform(double n, double t, double alpha);
BoundBracket bound_unweighted(double n, double t, double q_hat, double alpha_hat);
double bound_alt_lower(double n, double t, double alpha, double d);
int choose_d(double n, double alpha);

struct NearIndependenceQuery {
    std::vector<std::size_t> I_plus, I_minus;
    std::size_t t() const { return I_plus.size() + I_minus.size(); }
    // Product of p_i over I+ and (1-p_i) over I-.
    double lambda(const RoundingInput& in) const;
    // min over all i of min(p_i, 1-p_i).
    static double alpha(const RoundingInput& in);
    // Harmonic mean of q_i over I (q_i = p_i on I+, 1-p_i on I-).
    double q_hat(const RoundingInput& in) const;
    // Arithmetic mean of min(p_j, 1-p_j) over indices outside I.
    double alpha_hat(const RoundingInput& in) const;
    void check(std::size_t n) const;
};

// Value of the joint event on one outcome: product of x_i over I+ and (1-x_i) over I-.
double joint_value(const std::vector<double>& x, const NearIndependenceQuery& q);

struct Estimate {
    double mean = 0, stderr_ = 0;
    std::uint64_t trials = 0;
};

// Monte Carlo estimate of the joint probability with the fractional variable
// resolved per `policy`. Trials are split across `workers` streams derived
// from `seed`; results depend on (seed, workers) only.
Estimate estimate_joint(const RoundingInput& input, const NearIndependenceQuery& query, std::uint64_t trials,
                        ResolvePolicy policy, std::uint64_t seed, int workers = 1);

// Exact outcome distribution by enumerating all n! permutations and both
// branches of every Simplify call. Limited to n <= 6.
struct WeightedOutcome {
    std::vector<double> x;
    double prob;
};
std::vector<WeightedOutcome> exact_distribution(const RoundingInput& input);
double exact_joint_small(const RoundingInput& input, const NearIndependenceQuery& query);

}  // namespace kmr
