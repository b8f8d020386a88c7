#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kmr/interval.hpp"
#include "kmr/lp.hpp"

namespace kmr {

enum class StarKind { C0 = 0, T1A = 1, T1B = 2, T2 = 3 };
const char* star_kind_name(StarKind k);

// Subclass label of a client class: P/N split on d2 <= d1, the primed
// variants for (1B,2), and M for a merged P/N class in reduced mode.
enum class Sign { P, N, Pp, Np, M };
const char* sign_name(Sign s);

struct ClientClass {
    Sign sign;
    StarKind x;  // class of i1's star
    StarKind y;  // class of i2's star (never C0)
    std::string name() const;
};

// Parameter row of algorithm A(p0, p1A, q1A, p1B, q1B, p2, q2) as expressions in (b, s0).
struct ParamRowExpr {
    Expr p0, p1A, q1A, p1B, q1B, p2, q2;
    Expr p(StarKind x) const;
    Expr q(StarKind y) const;
};

// The nine main-case rows as expressions; row 7 (zero based) is the A8 row.
std::array<ParamRowExpr, 9> table1_exprs();

struct NlpOptions {
    bool grouped = true;        // P classes use (D1-D2, D2), N classes use (D1, D2-D1)
    bool reduced = false;       // merge P/N for every class except (1B,2)
    bool prior_work_row = true;  // X <= a*sum D1 + b(1+2a)*sum D2
};

// One linear constraint sum_v coef_v(params) * var_v >= 0.
struct NlpConstraint {
    std::string name;
    std::vector<std::pair<int, Expr>> terms;
    int algorithm = -1;  // zero-based algorithm index for cost rows, -1 otherwise
};

// Default domain of the four scalars. The g upper end is +infinity.
ParamBox nlp_domain();
// Small box of half-width `hw` around the appendix tight point (s0 capped at 1).
ParamBox tight_point_box(double hw);
ParamPoint tight_point();

struct NlpPointResult {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0;
    std::vector<std::string> class_names;
    std::vector<double> d1, d2;  // per class, in the original D basis
};

struct RelaxedResult {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0;  // +infinity unless the relaxed LP solved to optimality
    int dropped = 0;   // constraints dropped for undefined or infinite coefficients
    bool primes_fixed = false;
};

class NlpProgram {
public:
    explicit NlpProgram(NlpOptions opt = {});

    const NlpOptions& options() const { return opt_; }
    const std::vector<ClientClass>& classes() const { return classes_; }
    const std::vector<NlpConstraint>& constraints() const { return cons_; }
    int num_vars() const { return nvars_; }
    static constexpr int kVarX = 0;
    static constexpr int kVarOne = 1;
    static constexpr std::uint32_t kAllAlgorithms = 0x1FF;

    // Exact LP at a point: the program is linear once the four scalars are fixed.
    NlpPointResult point_eval(const ParamPoint& pt, std::uint32_t active = kAllAlgorithms) const;
    // Interval relaxation over a box: each coefficient is replaced by the upper
    // end of its enclosure; constraints with undefined or infinite maxima are dropped.
    // Bit i of `active` keeps the cost row of algorithm i + 1.
    RelaxedResult relaxed_bound(const ParamBox& box, std::uint32_t active = kAllAlgorithms,
                                const IntervalPolicy& pol = {}) const;

private:
    struct ClassVars {
        int v0, v1;
    };
    // Linear form over (D1, D2) of one class mapped into the class's variable basis.
    void add_class_form(NlpConstraint& c, std::size_t z, const Expr& k1, const Expr& k2) const;
    void build();

    NlpOptions opt_;
    std::vector<ClientClass> classes_;
    std::vector<ClassVars> vars_;
    std::vector<NlpConstraint> cons_;
    int nvars_ = 0;
};

// Maxima of the closed-form edge-case ratio over the three regions.
struct EdgeMaxima {
    double low_high_b;  // b in [1/4,0.508] u [3/4,5/6], r_D free
    double rd_low;      // b in [0.508,3/4], r_D = 19/40
    double rd_high;     // b in [0.508,3/4], r_D = 2/3
};
double edge_f(double b, double rd);
EdgeMaxima edge_formula_maxima();

}  // namespace kmr
