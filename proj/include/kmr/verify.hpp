#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kmr/depround.hpp"

namespace kmr {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Sampler under test; the default is dep_round. A faulty sampler lets the
// suites demonstrate that they detect broken output.
using Sampler = std::function<RoundingOutcome(const RoundingInput&, Rng&)>;
Sampler default_sampler();
// dep_round followed by forcing x_0 = 1, which breaks the weighted sum and the marginals.
Sampler faulty_sampler();

struct DepRoundSuiteOptions {
    std::uint64_t seed = 1;
    std::uint64_t simplify_calls = 100000;
    std::uint64_t invariant_samples = 1000000;
    std::uint64_t joint_samples = 1000000;
    std::uint64_t oracle_samples = 1000000;
    int workers = 1;
    Sampler sampler = default_sampler();
};

// Names of the checks run_depround_suite performs, in order.
std::vector<std::string> depround_suite_plan();

// Both branches of random Simplify calls across all four cases: one integral
// entry, exact weighted sum, exact expectations and the two product inequalities.
CheckResult check_simplify(std::uint64_t calls, std::uint64_t seed);
// At most one fractional entry and a preserved weighted sum on every sample
// (n <= 50, weight ratio <= 2).
CheckResult check_depround_invariants(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler);
// Uniform p = 0.5, unit weights, n = 200: marginals, joint probabilities for
// t in {2,3,4} inside the unweighted bracket, and pairwise negative correlation.
CheckResult check_near_independence(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler);
// n = 4, p = (0.3, 0.5, 0.7, 0.5): empirical outcome frequencies against the exact distribution.
CheckResult check_exact_oracle(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler);

std::vector<CheckResult> run_depround_suite(const DepRoundSuiteOptions& opt);

struct BipointQuality {
    int instances = 0;
    double mean_ratio = 0, stderr_ = 0, max_ratio = 0;
    int cap_violations = 0;
    int budget_violations = 0;  // Table 1 rows with E > k + 1
    int center_or_leaves_violations = 0;
    long runs = 0;
};

// Best-of-nine rounding on synthesized main-regime instances; every one of the
// nine runs is checked against its explicit facility cap.
BipointQuality measure_bipoint_quality(int instances, std::uint64_t seed, double eta, int workers = 1);
CheckResult check_bipoint_quality(int instances, std::uint64_t seed, double eta, int workers = 1);
// Dichotomy on fixtures whose leaf count is below the Case 2 threshold: cost must equal D2 exactly.
CheckResult check_dichotomy_case2(int fixtures, std::uint64_t seed, double eta);

// Random nested boxes in the default domain: the relaxed bound of the inner box
// dominates the program at a point inside it and never exceeds the outer bound.
CheckResult check_relaxed_boxes(int pairs, std::uint64_t seed);

}  // namespace kmr
