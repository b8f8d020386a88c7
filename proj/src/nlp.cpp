#include "kmr/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace kmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Expr kB = Expr::var(Param::B);
const Expr kRD = Expr::var(Param::RD);
const Expr kG = Expr::var(Param::G);
const Expr kS0 = Expr::var(Param::S0);

struct Coef {
    Expr d1, d2;
};

// Per-class cost coefficients with P = 1 - p_X and Q = 1 - q_Y.
Coef c213(const Expr& P, const Expr& Q) { return {Q, 1.0 - Q + 2.0 * P * Q}; }
Coef c123(const Expr& P, const Expr& Q) { return {1.0 - P + P * Q, P + P * Q}; }
Coef c210(const Expr& P, const Expr& Q) { return {Q + P * Q * kG, 1.0 - Q + P * Q * kG}; }
Coef c120(const Expr& P, const Expr& Q) { return {1.0 - P + P * Q * (1.0 + kG), P + P * Q * (kG - 1.0)}; }
Coef c145(const Expr& P, const Expr& q2) {
    const Expr t = P / kG + P * (1.0 - q2) / kG;
    return {1.0 + t, 2.0 * P + t};
}

bool is_p_basis(Sign s) { return s == Sign::P || s == Sign::Pp; }
bool is_n_basis(Sign s) { return s == Sign::N || s == Sign::Np; }

}  // namespace

const char* star_kind_name(StarKind k) {
    switch (k) {
        case StarKind::C0: return "0";
        case StarKind::T1A: return "1A";
        case StarKind::T1B: return "1B";
        case StarKind::T2: return "2";
    }
    return "?";
}

const char* sign_name(Sign s) {
    switch (s) {
        case Sign::P: return "P";
        case Sign::N: return "N";
        case Sign::Pp: return "P'";
        case Sign::Np: return "N'";
        case Sign::M: return "M";
    }
    return "?";
}

std::string ClientClass::name() const {
    return fmt::format("{}({},{})", sign_name(sign), star_kind_name(x), star_kind_name(y));
}

Expr ParamRowExpr::p(StarKind x) const {
    switch (x) {
        case StarKind::C0: return p0;
        case StarKind::T1A: return p1A;
        case StarKind::T1B: return p1B;
        case StarKind::T2: return p2;
    }
    return p0;
}

Expr ParamRowExpr::q(StarKind y) const {
    switch (y) {
        case StarKind::T1A: return q1A;
        case StarKind::T1B: return q1B;
        case StarKind::T2: return q2;
        case StarKind::C0: break;
    }
    throw std::invalid_argument("q is undefined for class 0");
}

std::array<ParamRowExpr, 9> table1_exprs() {
    const Expr a = 1.0 - kB;
    const Expr bs = kB * kS0;
    return {{
        {0.0, 0.0, 1.0, 0.0, 1.0, a * kS0, 1.0 - a * kS0},
        {1.0, 0.0, 1.0, 0.0, 1.0, 1.0 - bs, bs},
        {1.0, 0.0, 1.0, 1.0, 0.0, 1.0 - bs, bs},
        {1.0, 1.0, 0.0, 0.0, 1.0, 1.0 - bs, bs},
        {1.0, 1.0, 0.0, 1.0, 0.0, 1.0 - bs, bs},
        {1.0, 1.0, 1.0, 1.0, 0.0, 1.0 - (kB - a) * kS0, (kB - a) * kS0},
        {1.0, 1.0, 0.0, 1.0, 0.0, 1.0, bs / 2.0},
        {0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0},
        {a, a, kB, a, kB, a, kB},
    }};
}

ParamBox nlp_domain() {
    return {Interval{0.508, 0.75, false}, Interval{19.0 / 40.0, 2.0 / 3.0, false}, Interval{0.0, kInf, false},
            Interval{5.0 / 6.0, 1.0, false}};
}

ParamPoint tight_point() { return {0.645, 0.497, 0.646, 1.0}; }

ParamBox tight_point_box(double hw) {
    const ParamPoint t = tight_point();
    ParamBox box;
    for (int i = 0; i < kNumParams; ++i) box[i] = {t[i] - hw, std::min(1.0, t[i] + hw), false};
    box[static_cast<int>(Param::S0)] = {1.0 - hw, 1.0, false};
    return box;
}

NlpProgram::NlpProgram(NlpOptions opt) : opt_(opt) { build(); }

void NlpProgram::add_class_form(NlpConstraint& c, std::size_t z, const Expr& k1, const Expr& k2) const {
    const Sign s = classes_[z].sign;
    const ClassVars v = vars_[z];
    if (!opt_.grouped || s == Sign::M) {
        c.terms.emplace_back(v.v0, k1);
        c.terms.emplace_back(v.v1, k2);
    } else if (is_p_basis(s)) {
        // D1 = u + D2, D2 = D2
        c.terms.emplace_back(v.v0, k1);
        c.terms.emplace_back(v.v1, k1 + k2);
    } else {
        // D1 = D1, D2 = D1 + v
        c.terms.emplace_back(v.v0, k1 + k2);
        c.terms.emplace_back(v.v1, k2);
    }
}

void NlpProgram::build() {
    const StarKind xs[] = {StarKind::C0, StarKind::T1A, StarKind::T1B, StarKind::T2};
    const StarKind ys[] = {StarKind::T1A, StarKind::T1B, StarKind::T2};
    auto is_1b2 = [](StarKind x, StarKind y) { return x == StarKind::T1B && y == StarKind::T2; };
    if (opt_.reduced) {
        for (StarKind x : xs)
            for (StarKind y : ys)
                if (!is_1b2(x, y)) classes_.push_back({Sign::M, x, y});
        classes_.push_back({Sign::P, StarKind::T1B, StarKind::T2});
        classes_.push_back({Sign::N, StarKind::T1B, StarKind::T2});
    } else {
        for (Sign s : {Sign::P, Sign::N})
            for (StarKind x : xs)
                for (StarKind y : ys) classes_.push_back({s, x, y});
    }
    classes_.push_back({Sign::Pp, StarKind::T1B, StarKind::T2});
    classes_.push_back({Sign::Np, StarKind::T1B, StarKind::T2});

    nvars_ = 2;
    for (std::size_t z = 0; z < classes_.size(); ++z) {
        vars_.push_back({nvars_, nvars_ + 1});
        nvars_ += 2;
    }

    const auto rows = table1_exprs();
    for (int i = 0; i < 9; ++i) {
        NlpConstraint c{fmt::format("cost_A{}", i + 1), {{kVarX, -1.0}}, i};
        const ParamRowExpr& r = rows[i];
        for (std::size_t z = 0; z < classes_.size(); ++z) {
            const ClientClass& cl = classes_[z];
            const Expr P = 1.0 - r.p(cl.x);
            const Expr Q = 1.0 - r.q(cl.y);
            Coef k;
            if (i == 7 && cl.y == StarKind::T1A) {
                k = c145(P, r.q2);
            } else {
                switch (cl.sign) {
                    case Sign::P: k = c213(P, Q); break;
                    case Sign::N: k = c123(P, Q); break;
                    case Sign::Pp: k = c210(P, Q); break;
                    case Sign::Np: k = c120(P, Q); break;
                    case Sign::M: {
                        const Coef u = c213(P, Q), w = c123(P, Q);
                        k = {emax(u.d1, w.d1), emax(u.d2, w.d2)};
                        break;
                    }
                }
            }
            add_class_form(c, z, k.d1, k.d2);
        }
        cons_.push_back(std::move(c));
    }

    if (opt_.prior_work_row) {
        const Expr a = 1.0 - kB;
        NlpConstraint c{"prior_work_A9", {{kVarX, -1.0}}, 8};
        for (std::size_t z = 0; z < classes_.size(); ++z) add_class_form(c, z, a, kB * (1.0 + 2.0 * a));
        cons_.push_back(std::move(c));
    }

    for (std::size_t z = 0; z < classes_.size(); ++z) {
        const ClientClass& cl = classes_[z];
        if (opt_.grouped && cl.sign != Sign::M) continue;
        if (cl.sign == Sign::M) continue;
        NlpConstraint c{"sign_" + cl.name(), {}, -1};
        if (is_p_basis(cl.sign)) add_class_form(c, z, 1.0, -1.0);
        else add_class_form(c, z, -1.0, 1.0);
        cons_.push_back(std::move(c));
    }

    for (std::size_t z = 0; z < classes_.size(); ++z) {
        const ClientClass& cl = classes_[z];
        if (!is_1b2(cl.x, cl.y)) continue;
        NlpConstraint c{"ratio_" + cl.name(), {}, -1};
        if (cl.sign == Sign::P || cl.sign == Sign::N) add_class_form(c, z, kG, kG - 2.0);
        else add_class_form(c, z, -kG, 2.0 - kG);
        cons_.push_back(std::move(c));
    }

    const Expr den = 1.0 - kB + kB * kRD;
    const Expr n1 = 1.0 / den;
    const Expr n2 = kRD / den;
    NlpConstraint s1lo{"sum_D1_lo", {{kVarOne, -n1}}, -1}, s1hi{"sum_D1_hi", {{kVarOne, n1}}, -1};
    NlpConstraint s2lo{"sum_D2_lo", {{kVarOne, -n2}}, -1}, s2hi{"sum_D2_hi", {{kVarOne, n2}}, -1};
    for (std::size_t z = 0; z < classes_.size(); ++z) {
        add_class_form(s1lo, z, 1.0, 0.0);
        add_class_form(s1hi, z, -1.0, 0.0);
        add_class_form(s2lo, z, 0.0, 1.0);
        add_class_form(s2hi, z, 0.0, -1.0);
    }
    for (auto* c : {&s1lo, &s1hi, &s2lo, &s2hi}) cons_.push_back(std::move(*c));
}

namespace {

bool row_active(const NlpConstraint& c, std::uint32_t active) {
    return c.algorithm < 0 || ((active >> c.algorithm) & 1u);
}

LinearProgram base_lp(int nvars) {
    LinearProgram lp(nvars);
    lp.objective[NlpProgram::kVarX] = 1.0;
    lp.lower[NlpProgram::kVarOne] = 1.0;
    lp.upper[NlpProgram::kVarOne] = 1.0;
    return lp;
}

}  // namespace

NlpPointResult NlpProgram::point_eval(const ParamPoint& pt, std::uint32_t active) const {
    LinearProgram lp = base_lp(nvars_);
    for (const auto& c : cons_) {
        if (!row_active(c, active)) continue;
        std::vector<double> coef(nvars_, 0.0);
        bool finite = true;
        for (const auto& [v, e] : c.terms) {
            const double x = e.eval(pt);
            if (!std::isfinite(x)) finite = false;
            coef[v] += x;
        }
        // Rows with a singular coefficient at this point (1/g at g = 0) impose nothing useful.
        if (!finite) continue;
        lp.add_row(std::move(coef), Sense::GE, 0.0);
    }
    const LpResult r = solve_lp(lp);
    NlpPointResult out;
    out.status = r.status;
    if (r.status != LpStatus::Optimal) return out;
    out.value = r.value;
    for (std::size_t z = 0; z < classes_.size(); ++z) {
        const double x0 = r.x[vars_[z].v0], x1 = r.x[vars_[z].v1];
        double d1 = x0, d2 = x1;
        if (opt_.grouped && is_p_basis(classes_[z].sign)) d1 = x0 + x1;
        else if (opt_.grouped && is_n_basis(classes_[z].sign)) d2 = x0 + x1;
        out.class_names.push_back(classes_[z].name());
        out.d1.push_back(d1);
        out.d2.push_back(d2);
    }
    return out;
}

RelaxedResult NlpProgram::relaxed_bound(const ParamBox& box, std::uint32_t active, const IntervalPolicy& pol) const {
    RelaxedResult out;
    LinearProgram lp = base_lp(nvars_);
    // For g > 2 the (1B,2) ratio rows of the primed classes force both masses to zero.
    std::vector<char> fixed(nvars_, 0);
    if (box[static_cast<int>(Param::G)].lo > 2.0) {
        out.primes_fixed = true;
        for (std::size_t z = 0; z < classes_.size(); ++z)
            if (classes_[z].sign == Sign::Pp || classes_[z].sign == Sign::Np) {
                fixed[vars_[z].v0] = fixed[vars_[z].v1] = 1;
                lp.upper[vars_[z].v0] = lp.upper[vars_[z].v1] = 0.0;
            }
    }
    for (const auto& c : cons_) {
        if (!row_active(c, active)) continue;
        std::vector<double> coef(nvars_, 0.0);
        bool usable = true;
        for (const auto& [v, e] : c.terms) {
            if (fixed[v]) continue;
            const Interval iv = e.eval(box, pol);
            if (iv.undefined || !std::isfinite(iv.hi)) {
                usable = false;
                break;
            }
            coef[v] += iv.hi;
        }
        if (!usable) {
            ++out.dropped;
            continue;
        }
        lp.add_row(std::move(coef), Sense::GE, 0.0);
    }
    const LpResult r = solve_lp(lp);
    out.status = r.status;
    // Anything short of an optimal basis gives no usable bound.
    out.value = r.status == LpStatus::Optimal ? r.value : kInf;
    return out;
}

double edge_f(double b, double rd) {
    const double den = 1.0 - b + b * rd;
    const double a = 1.0 - b;
    return std::min(1.0 / den, (a + b * (1.0 + 2.0 * a) * rd) / den);
}

namespace {

// Grid maximization over a rectangle followed by shrinking-grid refinement around the best cell.
double maximize_2d(double blo, double bhi, double rlo, double rhi) {
    const int n = 400;
    double best = -kInf, bb = blo, br = rlo;
    double hb = (bhi - blo) / n, hr = (rhi - rlo) / n;
    for (int it = 0; it < 8; ++it) {
        const double b0 = std::max(blo, bb - (it == 0 ? 0 : n / 2) * hb);
        const double r0 = std::max(rlo, br - (it == 0 ? 0 : n / 2) * hr);
        for (int i = 0; i <= n; ++i) {
            const double b = std::min(bhi, b0 + i * hb);
            for (int j = 0; j <= n; ++j) {
                const double r = std::min(rhi, r0 + j * hr);
                const double v = edge_f(b, r);
                if (v > best) {
                    best = v;
                    bb = b;
                    br = r;
                }
            }
        }
        hb *= 4.0 / n;
        hr *= 4.0 / n;
    }
    return best;
}

}  // namespace

EdgeMaxima edge_formula_maxima() {
    EdgeMaxima m;
    m.low_high_b = std::max(maximize_2d(0.25, 0.508, 0.0, 2.0), maximize_2d(0.75, 5.0 / 6.0, 0.0, 2.0));
    m.rd_low = maximize_2d(0.508, 0.75, 19.0 / 40.0, 19.0 / 40.0);
    m.rd_high = maximize_2d(0.508, 0.75, 2.0 / 3.0, 2.0 / 3.0);
    return m;
}

}  // namespace kmr
