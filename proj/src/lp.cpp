#include "kmr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmr {

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

int LinearProgram::add_var(double lo, double hi, double obj) {
    ++num_vars;
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    for (auto& r : rows) r.coef.push_back(0.0);
    return num_vars - 1;
}

void LinearProgram::add_row(std::vector<double> coef, Sense sense, double rhs) {
    coef.resize(num_vars, 0.0);
    rows.push_back({std::move(coef), sense, rhs});
}

void LinearProgram::check() const {
    if (static_cast<int>(objective.size()) != num_vars || static_cast<int>(lower.size()) != num_vars ||
        static_cast<int>(upper.size()) != num_vars)
        throw std::invalid_argument("LP dimension mismatch");
    for (int j = 0; j < num_vars; ++j) {
        if (!std::isfinite(lower[j])) throw std::invalid_argument("LP lower bounds must be finite");
        if (!std::isfinite(objective[j])) throw std::invalid_argument("LP objective must be finite");
    }
    for (const auto& r : rows) {
        if (static_cast<int>(r.coef.size()) != num_vars) throw std::invalid_argument("LP row length mismatch");
        for (double c : r.coef)
            if (!std::isfinite(c)) throw std::invalid_argument("LP coefficients must be finite");
        if (!std::isfinite(r.rhs)) throw std::invalid_argument("LP right-hand side must be finite");
    }
}

namespace {

// Dense tableau over columns [structural | slack/surplus | artificial | rhs].
class Tableau {
public:
    Tableau(int m, int ncols) : m_(m), n_(ncols), t_(static_cast<std::size_t>(m + 1) * (ncols + 1), 0.0) {}

    double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (n_ + 1) + c]; }
    double& rhs(int r) { return at(r, n_); }
    // Row m_ holds the reduced costs of the current objective (maximization: entering if > tol).
    double& obj(int c) { return at(m_, c); }

    void pivot(int r, int c) {
        const double inv = 1.0 / at(r, c);
        double* pr = &at(r, 0);
        for (int j = 0; j <= n_; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* pi = &at(i, 0);
            const double f = pi[c];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
    }

    int m_, n_;
    std::vector<double> t_;
};

LpResult solve_once(const LinearProgram& lp, const LpOptions& opt) {
    const int nv = lp.num_vars;
    const double tol = opt.tol;

    // Shift x = y + lower and collect rows in the form sum a y (sense) b.
    struct R {
        std::vector<double> a;
        Sense s;
        double b;
    };
    std::vector<R> rows;
    for (const auto& r : lp.rows) {
        double b = r.rhs;
        for (int j = 0; j < nv; ++j) b -= r.coef[j] * lp.lower[j];
        rows.push_back({r.coef, r.sense, b});
    }
    for (int j = 0; j < nv; ++j) {
        if (std::isfinite(lp.upper[j])) {
            if (lp.upper[j] < lp.lower[j] - tol) return {LpStatus::Infeasible, 0, {}, 0};
            std::vector<double> a(nv, 0.0);
            a[j] = 1;
            rows.push_back({a, Sense::LE, lp.upper[j] - lp.lower[j]});
        }
    }
    // Scale every row to unit max magnitude; the solution is unchanged.
    for (auto& r : rows) {
        double mx = 0;
        for (double v : r.a) mx = std::max(mx, std::fabs(v));
        if (mx > 0) {
            for (double& v : r.a) v /= mx;
            r.b /= mx;
        }
    }
    for (auto& r : rows) {
        if (r.b < 0) {
            for (double& v : r.a) v = -v;
            r.b = -r.b;
            if (r.s == Sense::LE) r.s = Sense::GE;
            else if (r.s == Sense::GE) r.s = Sense::LE;
        }
    }
    const int m = static_cast<int>(rows.size());
    int nslack = 0, nart = 0;
    for (const auto& r : rows) {
        if (r.s != Sense::EQ) ++nslack;
        if (r.s != Sense::LE) ++nart;
    }
    const int ncols = nv + nslack + nart;
    const int art0 = nv + nslack;
    Tableau T(m, ncols);
    std::vector<int> basis(m);
    int si = nv, ai = art0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < nv; ++j) T.at(i, j) = rows[i].a[j];
        T.rhs(i) = rows[i].b;
        if (rows[i].s == Sense::LE) {
            T.at(i, si) = 1;
            basis[i] = si++;
        } else if (rows[i].s == Sense::GE) {
            T.at(i, si++) = -1;
            T.at(i, ai) = 1;
            basis[i] = ai++;
        } else {
            T.at(i, ai) = 1;
            basis[i] = ai++;
        }
    }

    LpResult res;
    std::vector<char> banned(ncols, 0);

    // Runs simplex on the objective currently stored in row m. Returns false when
    // the pivot limit is hit. Entering candidates are tried in order of reduced
    // cost (index order under Bland); a candidate whose ratio-test pivot element
    // is below kMinPivot is passed over while another candidate remains.
    constexpr double kMinPivot = 1e-7;
    auto run = [&](bool& unbounded) -> bool {
        int degenerate = 0;
        const int bland_after = 10 * std::max(1, m);
        std::vector<int> cand;
        while (true) {
            if (res.pivots >= opt.max_pivots) return false;
            const bool bland = degenerate > bland_after;
            cand.clear();
            for (int c = 0; c < ncols; ++c)
                if (!banned[c] && T.obj(c) > tol) cand.push_back(c);
            if (cand.empty()) return true;
            if (!bland) std::stable_sort(cand.begin(), cand.end(), [&](int x, int y) { return T.obj(x) > T.obj(y); });

            int enter = -1, leave = -1;
            double ratio = 0;
            int fb_enter = -1, fb_leave = -1;
            double fb_ratio = 0;
            for (int c : cand) {
                // Two-pass ratio test: find the minimum ratio, then among the rows
                // within tolerance of it take the largest pivot (lowest basis index under Bland).
                double rmin = std::numeric_limits<double>::infinity();
                for (int i = 0; i < m; ++i) {
                    const double a = T.at(i, c);
                    if (a <= tol) continue;
                    rmin = std::min(rmin, std::max(T.rhs(i), 0.0) / a);
                }
                int r = -1;
                for (int i = 0; i < m; ++i) {
                    const double a = T.at(i, c);
                    if (a <= tol) continue;
                    const double q = std::max(T.rhs(i), 0.0) / a;
                    if (q > rmin + 1e-11 * std::max(1.0, rmin)) continue;
                    if (r < 0 || (bland ? basis[i] < basis[r] : a > T.at(r, c))) r = i;
                }
                if (r < 0) {
                    unbounded = true;
                    return true;
                }
                if (T.at(r, c) >= kMinPivot) {
                    enter = c;
                    leave = r;
                    ratio = std::max(T.rhs(r), 0.0) / T.at(r, c);
                    break;
                }
                if (fb_enter < 0) {
                    fb_enter = c;
                    fb_leave = r;
                    fb_ratio = std::max(T.rhs(r), 0.0) / T.at(r, c);
                }
            }
            if (enter < 0) {
                enter = fb_enter;
                leave = fb_leave;
                ratio = fb_ratio;
            }
            if (ratio <= tol) ++degenerate;
            else degenerate = 0;
            T.pivot(leave, enter);
            basis[leave] = enter;
            ++res.pivots;
        }
    };

    // Phase 1: maximize -sum(artificials).
    if (nart > 0) {
        for (int c = 0; c <= ncols; ++c) T.obj(c) = 0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= art0)
                for (int c = 0; c <= ncols; ++c) T.obj(c) += T.at(i, c);
        for (int c = art0; c < ncols; ++c) T.obj(c) = 0;
        bool unb = false;
        if (!run(unb)) {
            res.status = LpStatus::NumericalFailure;
            return res;
        }
        double infeas = 0;
        double scale = 1;
        for (int i = 0; i < m; ++i) {
            scale = std::max(scale, std::fabs(rows[i].b));
            if (basis[i] >= art0) infeas += T.rhs(i);
        }
        if (infeas > 1e-7 * scale) {
            res.status = LpStatus::Infeasible;
            return res;
        }
        // Drive remaining (zero-valued) artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            if (basis[i] < art0) continue;
            int c_best = -1;
            double mag = 1e-9;
            for (int c = 0; c < art0; ++c)
                if (std::fabs(T.at(i, c)) > mag) {
                    mag = std::fabs(T.at(i, c));
                    c_best = c;
                }
            if (c_best >= 0) {
                T.pivot(i, c_best);
                basis[i] = c_best;
            }
        }
        for (int c = art0; c < ncols; ++c) banned[c] = 1;
    }

    // Phase 2: reduced costs of the true objective.
    for (int c = 0; c <= ncols; ++c) T.obj(c) = 0;
    for (int j = 0; j < nv; ++j) T.obj(j) = lp.objective[j];
    for (int i = 0; i < m; ++i) {
        const int b = basis[i];
        const double cb = b < nv ? lp.objective[b] : 0.0;
        if (cb == 0.0) continue;
        for (int c = 0; c <= ncols; ++c) T.obj(c) -= cb * T.at(i, c);
    }
    bool unb = false;
    if (!run(unb)) {
        res.status = LpStatus::NumericalFailure;
        return res;
    }
    if (unb) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    res.x.assign(nv, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < nv) res.x[basis[i]] = T.rhs(i);
    res.value = 0;
    for (int j = 0; j < nv; ++j) {
        res.x[j] += lp.lower[j];
        res.value += lp.objective[j] * res.x[j];
    }
    // Reject a basis that drifted away from feasibility on the unscaled rows.
    for (const auto& r : lp.rows) {
        double lhs = 0, mag = std::fabs(r.rhs);
        for (int j = 0; j < nv; ++j) {
            lhs += r.coef[j] * res.x[j];
            mag = std::max(mag, std::fabs(r.coef[j] * res.x[j]));
        }
        const double slack = 1e-7 * std::max(1.0, mag);
        const bool ok = r.sense == Sense::LE   ? lhs <= r.rhs + slack
                        : r.sense == Sense::GE ? lhs >= r.rhs - slack
                                               : std::fabs(lhs - r.rhs) <= slack;
        if (!ok) {
            res.status = LpStatus::NumericalFailure;
            return res;
        }
    }
    for (int j = 0; j < nv; ++j)
        if (res.x[j] < lp.lower[j] - 1e-7 * std::max(1.0, std::fabs(lp.lower[j])) ||
            res.x[j] > lp.upper[j] + 1e-7 * std::max(1.0, std::fabs(lp.upper[j]))) {
            res.status = LpStatus::NumericalFailure;
            return res;
        }
    res.status = LpStatus::Optimal;
    return res;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opt) {
    lp.check();
    LpResult r = solve_once(lp, opt);
    // A drifted basis is retried with a tighter and then a looser pivot tolerance.
    for (double f : {0.1, 10.0}) {
        if (r.status != LpStatus::NumericalFailure) break;
        LpOptions o = opt;
        o.tol = opt.tol * f;
        const int spent = r.pivots;
        r = solve_once(lp, o);
        r.pivots += spent;
    }
    return r;
}

}  // namespace kmr
