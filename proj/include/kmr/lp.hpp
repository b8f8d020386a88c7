#pragma once

#include <limits>
#include <string>
#include <vector>

namespace kmr {

enum class Sense { LE, GE, EQ };
enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus s);

// Dense LP: maximize c.x subject to rows and variable bounds lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
    struct Row {
        std::vector<double> coef;  // length = num_vars
        Sense sense = Sense::LE;
        double rhs = 0;
    };

    int num_vars = 0;
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<Row> rows;

    explicit LinearProgram(int n = 0)
        : num_vars(n), objective(n, 0.0), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

    int add_var(double lo = 0, double hi = std::numeric_limits<double>::infinity(), double obj = 0);
    // Appends a row; `coef` is resized to num_vars.
    void add_row(std::vector<double> coef, Sense sense, double rhs);
    void check() const;
};

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0;
    std::vector<double> x;
    int pivots = 0;
};

struct LpOptions {
    double tol = 1e-9;
    int max_pivots = 200000;
};

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opt = {});

}  // namespace kmr
