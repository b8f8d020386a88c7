#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmr {

inline constexpr double kTol = 1e-9;

struct Point {
    double x = 0, y = 0;
};

// Metric k-median / UFL instance. Facilities occupy point indices
// [0, nf) and clients [nf, nf+nc). Distances come either from 2-D points
// (Euclidean mode) or from an explicit symmetric matrix over all points.
class Instance {
public:
    enum class Mode { Euclidean, Matrix };

    std::vector<std::string> facility_ids;
    std::vector<std::string> client_ids;
    Mode mode = Mode::Euclidean;
    std::vector<Point> points;   // Euclidean mode, size nf+nc
    std::vector<double> matrix;  // Matrix mode, row-major (nf+nc)^2
    int k = 1;
    std::optional<std::vector<double>> facility_costs;  // present iff UFL mode

    int nf() const { return static_cast<int>(facility_ids.size()); }
    int nc() const { return static_cast<int>(client_ids.size()); }
    int npoints() const { return nf() + nc(); }
    bool ufl() const { return facility_costs.has_value(); }

    // Distance between two point indices.
    double dist(int u, int v) const;
    // Distance between facility i and client j (both zero-based in their own lists).
    double fc(int i, int j) const { return dist(i, nf() + j); }
    double ff(int i, int i2) const { return dist(i, i2); }

    static Instance euclidean(std::vector<Point> facilities, std::vector<Point> clients, int k);
    static Instance from_matrix(int nf, int nc, std::vector<double> matrix, int k);
};

struct Violation {
    std::string kind;  // "symmetry", "triangle", "diagonal", "negative", "nonfinite", "budget", "costs"
    std::vector<int> points;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_instance(const Instance& inst);

struct Solution {
    std::vector<int> open_set;    // sorted facility indices
    double connection_cost = 0;
    std::vector<int> assignment;  // client -> nearest open facility (lowest id on ties)
};

// Two facility sets with a|F1| + b|F2| = k, a + b = 1 and their connection costs.
struct BiPointSolution {
    std::vector<int> f1, f2;
    double a = 1, b = 0;
    double d1 = 0, d2 = 0;
    double cost() const { return a * d1 + b * d2; }
};

// Invariant violations of a bi-point solution against its instance (empty when valid).
std::vector<std::string> check_bipoint(const Instance& inst, const BiPointSolution& bp, double tol = 1e-6);

// Nearest open facility of every client and the summed distance. Throws on an empty set.
Solution evaluate(const Instance& inst, std::vector<int> open_set);
double connection_cost(const Instance& inst, const std::vector<int>& open_set);

// Exhaustive k-median optimum; the guard limits instances to at most 20 facilities.
Solution brute_force_kmedian(const Instance& inst);

// In-place Floyd-Warshall closure of an n x n row-major matrix.
void metric_closure(std::vector<double>& m, int n);

struct LowerBoundFamilyParams {
    double f1 = 0.5, f2 = 1.5, alpha = 1.0;
    int k = 4;
    double a() const { return (f2 - 1) / (f2 - f1); }
    double b() const { return (1 - f1) / (f2 - f1); }
    void check() const;
};

// Instance with |F1|=floor(f1 k), |F2|=floor(f2 k) and one client per (F1, F2) pair.
// Facilities [0, n1) form F1 and [n1, n1+n2) form F2.
Instance gen_lower_bound_family(const LowerBoundFamilyParams& params);
int lb_family_n1(const LowerBoundFamilyParams& params);
int lb_family_n2(const LowerBoundFamilyParams& params);

// OPT formula divided by the bi-point cost formula, both per client.
double analytic_lb_ratio(const LowerBoundFamilyParams& params);
double lb_opt_per_client(const LowerBoundFamilyParams& params);
double lb_bipoint_per_client(const LowerBoundFamilyParams& params);
// Closed-form expected cost per client when a fraction x of F1 is opened
// and the remaining budget goes to F2.
double lb_expected_cost_per_client(const LowerBoundFamilyParams& params, double x);

enum class GenMode { Euclidean, ClosedRandom };

Instance gen_random_instance(std::uint64_t seed, int nf, int nc, int k, GenMode mode);

// Adds uniform facility costs to turn a k-median instance into a UFL instance.
Instance with_uniform_cost(const Instance& inst, double cost);

}  // namespace kmr
