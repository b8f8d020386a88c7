#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>

namespace kmr {

// Closed interval with an "undefined" flag raised by division through zero
// or by indeterminate forms; the flag propagates through every operation.
struct Interval {
    double lo = 0, hi = 0;
    bool undefined = false;

    static Interval point(double v) { return {v, v, false}; }
    static Interval undef() { return {0, 0, true}; }
    bool contains(double v) const { return !undefined && lo <= v && v <= hi; }
    double width() const { return hi - lo; }
};

// Outward widening applied to every arithmetic result, relative to magnitude.
struct IntervalPolicy {
    double rel_eps = 1e-12;
};

Interval iadd(const Interval& a, const Interval& b, const IntervalPolicy& pol = {});
Interval isub(const Interval& a, const Interval& b, const IntervalPolicy& pol = {});
Interval imul(const Interval& a, const Interval& b, const IntervalPolicy& pol = {});
Interval idiv(const Interval& a, const Interval& b, const IntervalPolicy& pol = {});
Interval imax(const Interval& a, const Interval& b);

// The four nonlinear scalars of the factor-revealing program.
enum class Param { B = 0, RD = 1, G = 2, S0 = 3 };
inline constexpr int kNumParams = 4;
const char* param_name(Param p);

using ParamPoint = std::array<double, kNumParams>;
using ParamBox = std::array<Interval, kNumParams>;

// Immutable expression tree over the parameters and constants.
class Expr {
public:
    enum class Op { Const, Var, Add, Sub, Mul, Div, Max };

    Expr() : Expr(0.0) {}
    Expr(double c);  // NOLINT: implicit constants keep coefficient formulas readable
    static Expr var(Param p);

    double eval(const ParamPoint& pt) const;
    Interval eval(const ParamBox& box, const IntervalPolicy& pol = {}) const;
    std::string str() const;
    bool is_const() const;
    double const_value() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr emax(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expr make(Op op, const Expr& a, const Expr& b);
    std::shared_ptr<const Node> node_;
};

}  // namespace kmr
