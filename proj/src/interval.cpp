#include "kmr/interval.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace kmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval widen(double lo, double hi, const IntervalPolicy& pol) {
    if (std::isnan(lo) || std::isnan(hi)) return Interval::undef();
    if (std::isfinite(lo)) lo -= pol.rel_eps * std::fabs(lo);
    if (std::isfinite(hi)) hi += pol.rel_eps * std::fabs(hi);
    return {lo, hi, false};
}

// Endpoint product with the extended-interval convention 0 * inf = 0.
double xmul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

}  // namespace

Interval iadd(const Interval& a, const Interval& b, const IntervalPolicy& pol) {
    if (a.undefined || b.undefined) return Interval::undef();
    return widen(a.lo + b.lo, a.hi + b.hi, pol);
}

Interval isub(const Interval& a, const Interval& b, const IntervalPolicy& pol) {
    if (a.undefined || b.undefined) return Interval::undef();
    return widen(a.lo - b.hi, a.hi - b.lo, pol);
}

Interval imul(const Interval& a, const Interval& b, const IntervalPolicy& pol) {
    if (a.undefined || b.undefined) return Interval::undef();
    const double c[4] = {xmul(a.lo, b.lo), xmul(a.lo, b.hi), xmul(a.hi, b.lo), xmul(a.hi, b.hi)};
    return widen(*std::min_element(c, c + 4), *std::max_element(c, c + 4), pol);
}

Interval idiv(const Interval& a, const Interval& b, const IntervalPolicy& pol) {
    if (a.undefined || b.undefined) return Interval::undef();
    if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::undef();
    const Interval inv{1.0 / b.hi, 1.0 / b.lo, false};
    return imul(a, widen(inv.lo, inv.hi, pol), pol);
}

Interval imax(const Interval& a, const Interval& b) {
    if (a.undefined || b.undefined) return Interval::undef();
    return {std::max(a.lo, b.lo), std::max(a.hi, b.hi), false};
}

const char* param_name(Param p) {
    switch (p) {
        case Param::B: return "b";
        case Param::RD: return "r_D";
        case Param::G: return "g";
        case Param::S0: return "s0";
    }
    return "?";
}

struct Expr::Node {
    Op op;
    double value = 0;
    Param param = Param::B;
    std::shared_ptr<const Node> lhs, rhs;
};

Expr::Expr(double c) : node_(std::make_shared<Node>(Node{Op::Const, c, Param::B, nullptr, nullptr})) {}

Expr Expr::var(Param p) { return Expr(std::make_shared<Node>(Node{Op::Var, 0, p, nullptr, nullptr})); }

bool Expr::is_const() const { return node_->op == Op::Const; }
double Expr::const_value() const { return node_->value; }

Expr Expr::make(Op op, const Expr& a, const Expr& b) {
    // Fold constants so that coefficient trees stay small.
    if (a.is_const() && b.is_const()) {
        const double x = a.const_value(), y = b.const_value();
        switch (op) {
            case Op::Add: return Expr(x + y);
            case Op::Sub: return Expr(x - y);
            case Op::Mul: return Expr(x * y);
            case Op::Max: return Expr(std::max(x, y));
            default: break;
        }
    }
    if (op == Op::Mul && ((a.is_const() && a.const_value() == 0.0) || (b.is_const() && b.const_value() == 0.0)))
        return Expr(0.0);
    if (op == Op::Mul && a.is_const() && a.const_value() == 1.0) return b;
    if ((op == Op::Mul || op == Op::Div) && b.is_const() && b.const_value() == 1.0) return a;
    if ((op == Op::Add || op == Op::Sub) && b.is_const() && b.const_value() == 0.0) return a;
    if (op == Op::Add && a.is_const() && a.const_value() == 0.0) return b;
    return Expr(std::make_shared<Node>(Node{op, 0, Param::B, a.node_, b.node_}));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Op::Sub, Expr(0.0), a); }
Expr emax(const Expr& a, const Expr& b) { return Expr::make(Expr::Op::Max, a, b); }

double Expr::eval(const ParamPoint& pt) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return pt[static_cast<int>(n.param)];
        default: break;
    }
    const double x = Expr(n.lhs).eval(pt), y = Expr(n.rhs).eval(pt);
    switch (n.op) {
        case Op::Add: return x + y;
        case Op::Sub: return x - y;
        case Op::Mul: return x * y;
        case Op::Div: return x / y;
        case Op::Max: return std::max(x, y);
        default: return 0;
    }
}

Interval Expr::eval(const ParamBox& box, const IntervalPolicy& pol) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return Interval::point(n.value);
        case Op::Var: return box[static_cast<int>(n.param)];
        default: break;
    }
    const Interval x = Expr(n.lhs).eval(box, pol), y = Expr(n.rhs).eval(box, pol);
    switch (n.op) {
        case Op::Add: return iadd(x, y, pol);
        case Op::Sub: return isub(x, y, pol);
        case Op::Mul: return imul(x, y, pol);
        case Op::Div: return idiv(x, y, pol);
        case Op::Max: return imax(x, y);
        default: return Interval::undef();
    }
}

std::string Expr::str() const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return fmt::format("{}", n.value);
        case Op::Var: return param_name(n.param);
        default: break;
    }
    const char* sym = n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : n.op == Op::Div ? "/" : ",";
    if (n.op == Op::Max) return fmt::format("max({}, {})", Expr(n.lhs).str(), Expr(n.rhs).str());
    return fmt::format("({} {} {})", Expr(n.lhs).str(), sym, Expr(n.rhs).str());
}

}  // namespace kmr
