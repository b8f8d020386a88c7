#pragma once

#include <vector>

#include "kmr/core.hpp"
#include "kmr/lp.hpp"

namespace kmr {

struct JmsResult {
    Solution solution;          // open set and nearest-open assignment
    double facility_cost = 0;
    double total_cost = 0;      // facility_cost + solution.connection_cost
    std::vector<double> alpha;  // final budget per client
    std::vector<double> open_time;   // per facility, -1 when never opened
    std::vector<int> open_order;     // facilities in opening order
    std::vector<int> first_facility;  // facility each client first connected to
    double max_open_gap = 0;    // max |offers - cost| over opening events
    bool budgets_monotone = true;
    int events = 0;
};

// Primal-dual simulation with offers gamma * max(alpha - d, 0) from unconnected
// clients and max(d_current - d, 0) from connected ones. Requires facility costs.
JmsResult jms_run(const Instance& inst, double gamma = 1.0);

struct BiPointBuild {
    BiPointSolution bp;
    double price_lo = 0, price_hi = 0;
    int probes = 0;
    bool exact = false;  // a run opened exactly k facilities
};

// Binary search on a uniform facility price. tol <= 0 selects 1e-7 * max distance.
BiPointBuild build_bipoint(const Instance& inst, double tol = 0);

// 2k copies of a k-client star sharing one facility f' (index 0); facility
// 1 + l is the per-copy facility of copy l, client l*k + i is client i+1 of copy l.
Instance gen_jms_counterexample(int k, double gamma);

struct FactorLpResult {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0;
};

// Factor-revealing LP with each max{., 0} term linearized by an auxiliary variable.
FactorLpResult jms_factor_lp(int k);
// Same optimum by enumerating which branch of every max term is active (k <= 3).
FactorLpResult jms_factor_lp_enumerated(int k);

}  // namespace kmr
