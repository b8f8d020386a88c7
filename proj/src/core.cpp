#include "kmr/core.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>

#include "kmr/rng.hpp"

namespace kmr {

double Instance::dist(int u, int v) const {
    if (mode == Mode::Euclidean) {
        const Point& p = points[u];
        const Point& q = points[v];
        return std::hypot(p.x - q.x, p.y - q.y);
    }
    return matrix[static_cast<std::size_t>(u) * npoints() + v];
}

static void default_ids(Instance& inst, int nf, int nc) {
    inst.facility_ids.clear();
    inst.client_ids.clear();
    for (int i = 0; i < nf; ++i) inst.facility_ids.push_back(fmt::format("f{}", i));
    for (int j = 0; j < nc; ++j) inst.client_ids.push_back(fmt::format("c{}", j));
}

Instance Instance::euclidean(std::vector<Point> facilities, std::vector<Point> clients, int k) {
    Instance inst;
    default_ids(inst, static_cast<int>(facilities.size()), static_cast<int>(clients.size()));
    inst.mode = Mode::Euclidean;
    inst.points = std::move(facilities);
    inst.points.insert(inst.points.end(), clients.begin(), clients.end());
    inst.k = k;
    return inst;
}

Instance Instance::from_matrix(int nf, int nc, std::vector<double> matrix, int k) {
    Instance inst;
    default_ids(inst, nf, nc);
    if (matrix.size() != static_cast<std::size_t>(nf + nc) * (nf + nc))
        throw std::invalid_argument("distance matrix has the wrong size");
    inst.mode = Mode::Matrix;
    inst.matrix = std::move(matrix);
    inst.k = k;
    return inst;
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    const int n = inst.npoints();
    auto add = [&](std::string kind, std::vector<int> pts, std::string detail) {
        rep.violations.push_back({std::move(kind), std::move(pts), std::move(detail)});
    };
    if (inst.nf() < 1) add("budget", {}, "no facilities");
    if (inst.ufl()) {
        if (static_cast<int>(inst.facility_costs->size()) != inst.nf())
            add("costs", {}, "facility_costs length differs from facility count");
        for (int i = 0; i < static_cast<int>(inst.facility_costs->size()); ++i)
            if (!((*inst.facility_costs)[i] >= 0)) add("costs", {i}, "negative or non-finite facility cost");
    } else if (inst.k < 1 || inst.k > inst.nf()) {
        add("budget", {}, fmt::format("k={} outside [1, {}]", inst.k, inst.nf()));
    }
    if (inst.mode == Instance::Mode::Euclidean) {
        if (static_cast<int>(inst.points.size()) != n) add("nonfinite", {}, "point count differs from id count");
        for (int u = 0; u < static_cast<int>(inst.points.size()); ++u)
            if (!std::isfinite(inst.points[u].x) || !std::isfinite(inst.points[u].y))
                add("nonfinite", {u}, "non-finite coordinate");
        return rep;
    }
    if (inst.matrix.size() != static_cast<std::size_t>(n) * n) {
        add("nonfinite", {}, "matrix size differs from point count squared");
        return rep;
    }
    for (int u = 0; u < n; ++u) {
        if (std::fabs(inst.dist(u, u)) > kTol) add("diagonal", {u}, fmt::format("d(x,x)={}", inst.dist(u, u)));
        for (int v = 0; v < n; ++v) {
            double d = inst.dist(u, v);
            if (!std::isfinite(d)) add("nonfinite", {u, v}, "non-finite distance");
            else if (d < -kTol) add("negative", {u, v}, fmt::format("d={}", d));
            if (u < v && std::fabs(d - inst.dist(v, u)) > kTol)
                add("symmetry", {u, v}, fmt::format("{} vs {}", d, inst.dist(v, u)));
        }
    }
    for (int u = 0; u < n; ++u)
        for (int w = 0; w < n; ++w) {
            if (w == u) continue;
            const double duw = inst.dist(u, w);
            for (int v = 0; v < n; ++v) {
                if (v == u || v == w) continue;
                if (inst.dist(u, v) + inst.dist(v, w) < duw - kTol)
                    add("triangle", {u, v, w},
                        fmt::format("d(a,b)+d(b,c)={} < d(a,c)={}", inst.dist(u, v) + inst.dist(v, w), duw));
            }
        }
    return rep;
}

Solution evaluate(const Instance& inst, std::vector<int> open_set) {
    if (open_set.empty()) throw std::invalid_argument("connection cost of an empty open set");
    std::sort(open_set.begin(), open_set.end());
    open_set.erase(std::unique(open_set.begin(), open_set.end()), open_set.end());
    Solution sol;
    sol.assignment.assign(inst.nc(), -1);
    for (int j = 0; j < inst.nc(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int i : open_set) {
            double d = inst.fc(i, j);
            if (d < best) {
                best = d;
                sol.assignment[j] = i;
            }
        }
        sol.connection_cost += best;
    }
    sol.open_set = std::move(open_set);
    return sol;
}

double connection_cost(const Instance& inst, const std::vector<int>& open_set) {
    return evaluate(inst, open_set).connection_cost;
}

std::vector<std::string> check_bipoint(const Instance& inst, const BiPointSolution& bp, double tol) {
    std::vector<std::string> out;
    const double n1 = static_cast<double>(bp.f1.size()), n2 = static_cast<double>(bp.f2.size());
    if (bp.f1.empty() || bp.f2.empty()) out.push_back("empty facility set");
    for (const auto* set : {&bp.f1, &bp.f2})
        for (int i : *set)
            if (i < 0 || i >= inst.nf()) out.push_back(fmt::format("facility index {} out of range", i));
    if (!(n1 <= inst.k && inst.k <= n2)) out.push_back(fmt::format("|F1|={} <= k={} <= |F2|={} fails", n1, inst.k, n2));
    if (bp.a < -tol || bp.b < -tol || std::fabs(bp.a + bp.b - 1) > tol) out.push_back("a, b must be nonnegative with a + b = 1");
    if (std::fabs(bp.a * n1 + bp.b * n2 - inst.k) > tol) out.push_back("a|F1| + b|F2| != k");
    if (out.empty()) {
        if (std::fabs(connection_cost(inst, bp.f1) - bp.d1) > tol * std::max(1.0, bp.d1)) out.push_back("D1 mismatch");
        if (std::fabs(connection_cost(inst, bp.f2) - bp.d2) > tol * std::max(1.0, bp.d2)) out.push_back("D2 mismatch");
    }
    return out;
}

Solution brute_force_kmedian(const Instance& inst) {
    const int nf = inst.nf();
    if (nf > 20) throw std::invalid_argument("brute force limited to 20 facilities");
    const int k = std::min(inst.k, nf);
    // Opening more facilities never hurts, so enumerating size-k subsets suffices.
    std::vector<int> cur, best_set;
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            double c = connection_cost(inst, cur);
            if (c < best - 1e-12) {
                best = c;
                best_set = cur;
            }
            return;
        }
        for (int i = start; i <= nf - (k - static_cast<int>(cur.size())); ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return evaluate(inst, best_set);
}

void metric_closure(std::vector<double>& m, int n) {
    for (int w = 0; w < n; ++w)
        for (int u = 0; u < n; ++u) {
            const double duw = m[static_cast<std::size_t>(u) * n + w];
            if (!std::isfinite(duw)) continue;
            double* row = &m[static_cast<std::size_t>(u) * n];
            const double* wrow = &m[static_cast<std::size_t>(w) * n];
            for (int v = 0; v < n; ++v)
                if (duw + wrow[v] < row[v]) row[v] = duw + wrow[v];
        }
}

void LowerBoundFamilyParams::check() const {
    if (!(f1 > 0 && f1 < 1)) throw std::invalid_argument("f1 must lie in (0,1)");
    if (!(f2 > 1)) throw std::invalid_argument("f2 must exceed 1");
    if (!(alpha > 0.5 && alpha <= 1)) throw std::invalid_argument("alpha must lie in (1/2, 1]");
    if (k < 1) throw std::invalid_argument("k must be positive");
}

int lb_family_n1(const LowerBoundFamilyParams& p) { return static_cast<int>(std::floor(p.f1 * p.k + 1e-9)); }
int lb_family_n2(const LowerBoundFamilyParams& p) { return static_cast<int>(std::floor(p.f2 * p.k + 1e-9)); }

Instance gen_lower_bound_family(const LowerBoundFamilyParams& params) {
    params.check();
    const int n1 = lb_family_n1(params), n2 = lb_family_n2(params);
    if (n1 < 1 || n2 < params.k) throw std::invalid_argument("k too small for the requested f1, f2");
    const int nf = n1 + n2, nc = n1 * n2, n = nf + nc;
    const double inf = std::numeric_limits<double>::infinity();
    const double al = params.alpha;
    std::vector<double> m(static_cast<std::size_t>(n) * n, inf);
    auto set = [&](int u, int v, double d) {
        m[static_cast<std::size_t>(u) * n + v] = d;
        m[static_cast<std::size_t>(v) * n + u] = d;
    };
    for (int u = 0; u < n; ++u) set(u, u, 0);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const int j = nf + i1 * n2 + i2;
            for (int f = 0; f < n1; ++f) set(j, f, f == i1 ? al : 2 - al);
            for (int f = 0; f < n2; ++f) set(j, n1 + f, f == i2 ? 1 - al : 1 + al);
        }
    metric_closure(m, n);
    Instance inst = Instance::from_matrix(nf, nc, std::move(m), params.k);
    for (int i = 0; i < n1; ++i) inst.facility_ids[i] = fmt::format("F1_{}", i);
    for (int i = 0; i < n2; ++i) inst.facility_ids[n1 + i] = fmt::format("F2_{}", i);
    return inst;
}

double lb_opt_per_client(const LowerBoundFamilyParams& p) {
    const double al = p.alpha;
    return std::min(2 - al - 1 / p.f2, al + (2 * al - 1) * (p.f1 - 1) / p.f2);
}

double lb_bipoint_per_client(const LowerBoundFamilyParams& p) {
    const double al = p.alpha;
    return ((1 - p.f2) * al + (p.f1 - 1) * (1 - al)) / (p.f1 - p.f2);
}

double analytic_lb_ratio(const LowerBoundFamilyParams& params) {
    params.check();
    return lb_opt_per_client(params) / lb_bipoint_per_client(params);
}

double lb_expected_cost_per_client(const LowerBoundFamilyParams& p, double x) {
    const double al = p.alpha;
    const double open2 = (1 - x * p.f1) / p.f2;
    return open2 * (1 - al) + (1 - open2) * (x * al + (1 - x) * (2 - al));
}

Instance gen_random_instance(std::uint64_t seed, int nf, int nc, int k, GenMode mode) {
    if (nf < 1 || nc < 1) throw std::invalid_argument("need at least one facility and one client");
    Rng rng(seed);
    if (mode == GenMode::Euclidean) {
        std::vector<Point> f(nf), c(nc);
        for (auto& p : f) p = {rng.uniform(), rng.uniform()};
        for (auto& p : c) p = {rng.uniform(), rng.uniform()};
        return Instance::euclidean(std::move(f), std::move(c), k);
    }
    const int n = nf + nc;
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            double w = 1 + 9 * rng.uniform();
            m[static_cast<std::size_t>(u) * n + v] = w;
            m[static_cast<std::size_t>(v) * n + u] = w;
        }
    metric_closure(m, n);
    return Instance::from_matrix(nf, nc, std::move(m), k);
}

Instance with_uniform_cost(const Instance& inst, double cost) {
    Instance out = inst;
    out.facility_costs = std::vector<double>(inst.nf(), cost);
    return out;
}

}  // namespace kmr
