#include "kmr/jms.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class JmsSim {
public:
    JmsSim(const Instance& inst, double gamma)
        : inst_(inst), gamma_(gamma), nf_(inst.nf()), nc_(inst.nc()), cost_(*inst.facility_costs) {
        connected_.assign(nc_, 0);
        dcur_.assign(nc_, kInf);
        first_.assign(nc_, -1);
        alpha_.assign(nc_, 0.0);
        open_.assign(nf_, 0);
        open_time_.assign(nf_, -1.0);
        by_dist_.resize(nf_);
        for (int i = 0; i < nf_; ++i) {
            auto& v = by_dist_[i];
            v.resize(nc_);
            std::iota(v.begin(), v.end(), 0);
            std::stable_sort(v.begin(), v.end(), [&](int a, int b) { return inst.fc(i, a) < inst.fc(i, b); });
        }
    }

    JmsResult run() {
        int unconnected = nc_;
        JmsResult res;
        double last_t = 0;
        while (unconnected > 0) {
            // Facility openings first, lowest id first; re-scan after each opening
            // because new connections lower the remaining offers.
            while (true) {
                int pick = -1;
                for (int i = 0; i < nf_ && pick < 0; ++i)
                    if (!open_[i] && offer(i) >= cost_[i] - kTol * std::max(1.0, cost_[i])) pick = i;
                if (pick < 0) break;
                res.max_open_gap = std::max(res.max_open_gap, std::fabs(offer(pick) - cost_[pick]));
                open_facility(pick, unconnected);
                res.open_order.push_back(pick);
            }
            for (int j = 0; j < nc_; ++j) {
                if (connected_[j]) continue;
                int best = -1;
                for (int i = 0; i < nf_; ++i)
                    if (open_[i] && (best < 0 || inst_.fc(i, j) < inst_.fc(best, j))) best = i;
                if (best >= 0 && inst_.fc(best, j) <= t_ + kTol) {
                    connect(j, best);
                    --unconnected;
                }
            }
            if (unconnected == 0) break;
            double next = kInf;
            for (int i = 0; i < nf_; ++i) {
                if (open_[i]) {
                    for (int j = 0; j < nc_; ++j)
                        if (!connected_[j] && inst_.fc(i, j) > t_) next = std::min(next, inst_.fc(i, j));
                } else {
                    next = std::min(next, opening_time(i));
                }
            }
            if (!std::isfinite(next)) throw std::runtime_error("JMS simulation stalled");
            t_ = std::max(t_, next);
            if (t_ < last_t) res.budgets_monotone = false;
            last_t = t_;
            ++res.events;
        }
        std::vector<int> open_set;
        for (int i = 0; i < nf_; ++i)
            if (open_[i]) {
                open_set.push_back(i);
                res.facility_cost += cost_[i];
            }
        res.solution = evaluate(inst_, open_set);
        res.total_cost = res.facility_cost + res.solution.connection_cost;
        res.alpha = alpha_;
        res.open_time = open_time_;
        res.first_facility = first_;
        return res;
    }

private:
    double offer(int i) const {
        double s = 0;
        for (int j = 0; j < nc_; ++j) {
            const double d = inst_.fc(i, j);
            if (connected_[j]) s += std::max(dcur_[j] - d, 0.0);
            else s += gamma_ * std::max(t_ - d, 0.0);
        }
        return s;
    }

    // Earliest time >= t at which the offers to closed facility i reach its cost.
    double opening_time(int i) const {
        double fixed = 0;
        for (int j = 0; j < nc_; ++j)
            if (connected_[j]) fixed += std::max(dcur_[j] - inst_.fc(i, j), 0.0);
        const double need = (cost_[i] - fixed) / gamma_;
        if (need <= 0) return t_;
        int cnt = 0;
        double sum = 0;
        for (int j : by_dist_[i]) {
            if (connected_[j]) continue;
            const double d = inst_.fc(i, j);
            if (cnt > 0) {
                const double T = (need + sum) / cnt;
                if (T <= d) return std::max(T, t_);
            }
            ++cnt;
            sum += d;
        }
        if (cnt == 0) return kInf;
        return std::max((need + sum) / cnt, t_);
    }

    void connect(int j, int i) {
        connected_[j] = 1;
        alpha_[j] = t_;
        first_[j] = i;
        dcur_[j] = inst_.fc(i, j);
    }

    void open_facility(int i, int& unconnected) {
        open_[i] = 1;
        open_time_[i] = t_;
        for (int j = 0; j < nc_; ++j) {
            const double d = inst_.fc(i, j);
            if (!connected_[j]) {
                if (t_ >= d - kTol) {
                    connect(j, i);
                    --unconnected;
                }
            } else if (d < dcur_[j] - kTol) {
                dcur_[j] = d;
            }
        }
    }

    const Instance& inst_;
    double gamma_;
    int nf_, nc_;
    const std::vector<double>& cost_;
    double t_ = 0;
    std::vector<char> connected_, open_;
    std::vector<double> dcur_, alpha_, open_time_;
    std::vector<int> first_;
    std::vector<std::vector<int>> by_dist_;
};

}  // namespace

JmsResult jms_run(const Instance& inst, double gamma) {
    if (!inst.ufl()) throw std::invalid_argument("jms_run needs facility costs");
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be at least 1");
    if (inst.nf() < 1 || inst.nc() < 1) throw std::invalid_argument("empty instance");
    return JmsSim(inst, gamma).run();
}

BiPointBuild build_bipoint(const Instance& inst, double tol) {
    if (inst.ufl()) throw std::invalid_argument("build_bipoint expects a k-median instance");
    const int k = inst.k;
    if (k < 1 || k > inst.nf()) throw std::invalid_argument("k must lie in [1, |F|]");
    double maxd = 0;
    for (int i = 0; i < inst.nf(); ++i)
        for (int j = 0; j < inst.nc(); ++j) maxd = std::max(maxd, inst.fc(i, j));
    if (tol <= 0) tol = 1e-7 * std::max(maxd, 1e-12);

    BiPointBuild out;
    auto probe = [&](double price) {
        ++out.probes;
        return jms_run(with_uniform_cost(inst, price)).solution.open_set;
    };
    auto exact = [&](const std::vector<int>& s, double price) {
        out.exact = true;
        out.price_lo = out.price_hi = price;
        const double d = connection_cost(inst, s);
        out.bp = {s, s, 1.0, 0.0, d, d};
        return out;
    };

    double lo = 0, hi = inst.nc() * maxd + 1.0;
    std::vector<int> s_lo = probe(lo);
    if (static_cast<int>(s_lo.size()) == k) return exact(s_lo, lo);
    std::vector<int> s_hi = probe(hi);
    if (static_cast<int>(s_hi.size()) == k) return exact(s_hi, hi);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        std::vector<int> s = probe(mid);
        const int n = static_cast<int>(s.size());
        if (n == k) return exact(s, mid);
        if (n > k) {
            lo = mid;
            s_lo = std::move(s);
        } else {
            hi = mid;
            s_hi = std::move(s);
        }
    }
    const double n1 = static_cast<double>(s_hi.size()), n2 = static_cast<double>(s_lo.size());
    out.price_lo = lo;
    out.price_hi = hi;
    out.bp.a = (n2 - k) / (n2 - n1);
    out.bp.b = 1.0 - out.bp.a;
    out.bp.d1 = connection_cost(inst, s_hi);
    out.bp.d2 = connection_cost(inst, s_lo);
    out.bp.f1 = std::move(s_hi);
    out.bp.f2 = std::move(s_lo);
    return out;
}

Instance gen_jms_counterexample(int k, double gamma) {
    if (k < 2) throw std::invalid_argument("counterexample needs k >= 2");
    if (!(gamma >= 1.0)) throw std::invalid_argument("gamma must be at least 1");
    const int copies = 2 * k;
    const int nf = 1 + copies;
    const int nc = copies * k;
    const int n = nf + nc;
    const double far = 10.0 * k;
    std::vector<double> m(static_cast<std::size_t>(n) * n, far);
    auto set = [&](int u, int v, double d) {
        m[static_cast<std::size_t>(u) * n + v] = d;
        m[static_cast<std::size_t>(v) * n + u] = d;
    };
    for (int u = 0; u < n; ++u) set(u, u, 0.0);
    for (int l = 0; l < copies; ++l) {
        const int fl = 1 + l;
        const int c1 = nf + l * k;
        set(c1, 0, 1.0);
        set(c1, fl, 2.0);
        for (int i = 1; i < k; ++i) set(c1 + i, fl, 0.0);
    }
    metric_closure(m, n);
    Instance inst = Instance::from_matrix(nf, nc, std::move(m), copies);
    inst.facility_ids[0] = "f'";
    for (int l = 0; l < copies; ++l) {
        inst.facility_ids[1 + l] = fmt::format("f{}", l + 1);
        for (int i = 0; i < k; ++i) inst.client_ids[l * k + i] = fmt::format("c{}_{}", l + 1, i + 1);
    }
    inst.facility_costs = std::vector<double>(nf, 2.0 * gamma * (k - 1));
    return inst;
}

namespace {

// Variable layout of the factor-revealing LP for k clients.
struct FactorLayout {
    int k;
    int alpha(int i) const { return i; }
    int d(int i) const { return k + i; }
    int f() const { return 2 * k; }
    // r_{j,i} for j <= i
    int r(int j, int i) const { return 2 * k + 1 + i * (i + 1) / 2 + j; }
    // m_{i,j}: the j-th max term of the opening constraint for client i
    int m(int i, int j) const { return 2 * k + 1 + k * (k + 1) / 2 + i * k + j; }
    int size() const { return 2 * k + 1 + k * (k + 1) / 2 + k * k; }
};

// Shared rows of the factor LP (everything except the max terms).
LinearProgram factor_lp_base(const FactorLayout& L, int nvars) {
    const int k = L.k;
    LinearProgram lp(nvars);
    for (int i = 0; i < k; ++i) lp.objective[L.alpha(i)] = 1.0;
    auto row = [&] { return std::vector<double>(nvars, 0.0); };
    {
        auto c = row();
        c[L.f()] = 1;
        for (int i = 0; i < k; ++i) c[L.d(i)] = 1;
        lp.add_row(c, Sense::EQ, 1.0);
    }
    for (int i = 0; i + 1 < k; ++i) {
        auto c = row();
        c[L.alpha(i)] = 1;
        c[L.alpha(i + 1)] = -1;
        lp.add_row(c, Sense::LE, 0.0);
    }
    for (int i = 0; i + 1 < k; ++i)
        for (int j = 0; j <= i; ++j) {
            auto c = row();
            c[L.r(j, i)] = 1;
            c[L.r(j, i + 1)] = -1;
            lp.add_row(c, Sense::GE, 0.0);
        }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j) {
            auto c = row();
            c[L.alpha(i)] = 1;
            c[L.r(j, i)] = -1;
            c[L.d(i)] = -1;
            c[L.d(j)] = -1;
            lp.add_row(c, Sense::LE, 0.0);
        }
    for (int i = 0; i < k; ++i) {
        auto c = row();
        c[L.r(i, i)] = 1;
        c[L.alpha(i)] = -1;
        lp.add_row(c, Sense::LE, 0.0);
    }
    return lp;
}

// Argument of the j-th max term of the opening constraint for client i.
std::vector<double> max_argument(const FactorLayout& L, int nvars, int i, int j) {
    std::vector<double> c(nvars, 0.0);
    if (j < i) {
        c[L.r(j, i)] = 1;
        c[L.d(j)] = -1;
    } else {
        c[L.alpha(i)] = 1;
        c[L.d(j)] = -1;
    }
    return c;
}

}  // namespace

FactorLpResult jms_factor_lp(int k) {
    if (k < 1 || k > 20) throw std::invalid_argument("factor LP supports 1 <= k <= 20");
    const FactorLayout L{k};
    const int nv = L.size();
    LinearProgram lp = factor_lp_base(L, nv);
    for (int i = 0; i < k; ++i) {
        std::vector<double> sum(nv, 0.0);
        sum[L.f()] = -1;
        for (int j = 0; j < k; ++j) {
            auto c = max_argument(L, nv, i, j);
            c[L.m(i, j)] = -1;
            lp.add_row(c, Sense::LE, 0.0);
            sum[L.m(i, j)] = 1;
        }
        lp.add_row(sum, Sense::LE, 0.0);
    }
    const LpResult r = solve_lp(lp);
    return {r.status, r.value};
}

FactorLpResult jms_factor_lp_enumerated(int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("branch enumeration supports 1 <= k <= 3");
    const FactorLayout L{k};
    // Only alpha, d, f and r are needed; the m block stays unused at zero.
    const int nv = L.size();
    const int terms = k * k;
    FactorLpResult best{LpStatus::Infeasible, -std::numeric_limits<double>::infinity()};
    for (int mask = 0; mask < (1 << terms); ++mask) {
        LinearProgram lp = factor_lp_base(L, nv);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                std::vector<double> zero(nv, 0.0);
                zero[L.m(i, j)] = 1;
                lp.add_row(zero, Sense::EQ, 0.0);
            }
        for (int i = 0; i < k; ++i) {
            std::vector<double> sum(nv, 0.0);
            sum[L.f()] = -1;
            for (int j = 0; j < k; ++j) {
                const auto arg = max_argument(L, nv, i, j);
                if ((mask >> (i * k + j)) & 1) {
                    lp.add_row(arg, Sense::GE, 0.0);
                    for (int v = 0; v < nv; ++v) sum[v] += arg[v];
                } else {
                    lp.add_row(arg, Sense::LE, 0.0);
                }
            }
            lp.add_row(sum, Sense::LE, 0.0);
        }
        const LpResult r = solve_lp(lp);
        if (r.status == LpStatus::Optimal && r.value > best.value) best = {LpStatus::Optimal, r.value};
    }
    return best;
}

}  // namespace kmr
