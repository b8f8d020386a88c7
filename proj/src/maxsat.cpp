#include "kmr/maxsat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <fmt/format.h>

namespace kmr {

void CnfInstance::check() const {
    if (n < 0) throw std::invalid_argument("variable count must be nonnegative");
    if (k < 0 || k > n) throw std::invalid_argument(fmt::format("budget k={} outside [0, {}]", k, n));
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        const Clause& c = clauses[i];
        if (!(c.weight >= 0) || !std::isfinite(c.weight))
            throw std::invalid_argument(fmt::format("clause {} has an invalid weight", i + 1));
        for (const auto* lits : {&c.pos, &c.neg})
            for (int v : *lits)
                if (v < 0 || v >= n) throw std::invalid_argument(fmt::format("clause {} names variable {}", i + 1, v + 1));
        for (int v : c.pos)
            if (std::find(c.neg.begin(), c.neg.end(), v) != c.neg.end())
                throw std::invalid_argument(fmt::format("clause {} has variable {} in both signs", i + 1, v + 1));
    }
}

CnfInstance normalize_budget(const RawCnf& raw) {
    if (!(raw.a_cost >= 0) || !(raw.b_cost >= 0)) throw std::invalid_argument("costs must be nonnegative");
    CnfInstance out;
    out.n = raw.n;
    out.clauses = raw.clauses;
    double a = raw.a_cost, b = raw.b_cost;
    if (b > a) {
        out.complemented = true;
        std::swap(a, b);
        for (Clause& c : out.clauses) std::swap(c.pos, c.neg);
    }
    const double base = raw.n * b;
    if (raw.budget < base - 1e-9)
        throw std::invalid_argument(fmt::format("budget {} is below the cheapest assignment cost {}", raw.budget, base));
    if (a == b) out.k = raw.n;
    else out.k = static_cast<int>(std::min<double>(raw.n, std::floor((raw.budget - base) / (a - b) + 1e-9)));
    out.check();
    return out;
}

std::vector<char> to_raw_assignment(const CnfInstance& inst, std::vector<char> x) {
    if (inst.complemented)
        for (char& v : x) v = !v;
    return x;
}

double satisfied_weight(const CnfInstance& inst, const std::vector<char>& x) {
    double w = 0;
    for (const Clause& c : inst.clauses) {
        bool sat = false;
        for (int v : c.pos) sat = sat || x[v];
        for (int v : c.neg) sat = sat || !x[v];
        if (sat) w += c.weight;
    }
    return w;
}

double total_weight(const CnfInstance& inst) {
    double w = 0;
    for (const Clause& c : inst.clauses) w += c.weight;
    return w;
}

LpRelaxation lp_relax(const CnfInstance& inst) {
    inst.check();
    const int n = inst.n, m = static_cast<int>(inst.clauses.size());
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.add_var(0, 1, 0);
    for (int i = 0; i < m; ++i) lp.add_var(0, 1, inst.clauses[i].weight);
    if (n > 0) lp.add_row(std::vector<double>(n, 1.0), Sense::LE, inst.k);
    // sum_P y - sum_N y - z >= -|N|
    for (int i = 0; i < m; ++i) {
        const Clause& c = inst.clauses[i];
        std::vector<double> row(n + m, 0.0);
        for (int v : c.pos) row[v] += 1;
        for (int v : c.neg) row[v] -= 1;
        row[n + i] = -1;
        lp.add_row(std::move(row), Sense::GE, -static_cast<double>(c.neg.size()));
    }
    const LpResult r = solve_lp(lp);
    LpRelaxation out;
    out.status = r.status;
    if (r.status != LpStatus::Optimal) return out;
    out.value = r.value;
    out.y.assign(r.x.begin(), r.x.begin() + n);
    out.z.assign(r.x.begin() + n, r.x.end());
    for (double& v : out.y) v = std::clamp(v, 0.0, 1.0);
    for (double& v : out.z) v = std::clamp(v, 0.0, 1.0);
    return out;
}

RoundingDraw round_scaled(const CnfInstance& inst, const std::vector<double>& y, double eps, Rng& rng) {
    if (static_cast<int>(y.size()) != inst.n) throw std::invalid_argument("LP point has the wrong length");
    RoundingDraw d;
    d.x.assign(inst.n, 0);
    for (int j = 0; j < inst.n; ++j) {
        d.x[j] = rng.bernoulli((1.0 - eps) * y[j]);
        d.trues += d.x[j];
    }
    d.feasible = d.trues <= inst.k;
    d.weight = satisfied_weight(inst, d.x);
    return d;
}

namespace {

// Best assignment with at most k trues by enumerating the true sets.
ExactResult enumerate(const CnfInstance& inst) {
    ExactResult best;
    best.x.assign(inst.n, 0);
    best.value = satisfied_weight(inst, best.x);
    std::vector<char> x(inst.n, 0);
    std::function<void(int, int)> rec = [&](int start, int used) {
        for (int j = start; j < inst.n && used < inst.k; ++j) {
            x[j] = 1;
            const double w = satisfied_weight(inst, x);
            if (w > best.value + 1e-12) {
                best.value = w;
                best.x = x;
            }
            rec(j + 1, used + 1);
            x[j] = 0;
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

ExactResult brute_force_maxsat(const CnfInstance& inst) {
    inst.check();
    if (inst.n > 20) throw std::invalid_argument("brute force limited to 20 variables");
    return enumerate(inst);
}

MaxSatResult solve_maxsat(const CnfInstance& inst, const MaxSatOptions& opt) {
    inst.check();
    if (!(opt.epsilon > 0 && opt.epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5]");
    MaxSatResult res;
    if (inst.k <= 1.0 / (opt.epsilon * opt.epsilon * opt.epsilon)) {
        if (inst.n > opt.brute_max_n)
            throw std::invalid_argument(
                fmt::format("k={} calls for brute force but n={} exceeds {}", inst.k, inst.n, opt.brute_max_n));
        ExactResult e = enumerate(inst);
        res.method = "brute-force";
        res.x = std::move(e.x);
        res.value = e.value;
        return res;
    }
    if (opt.trials < 1) throw std::invalid_argument("trials must be positive");
    const LpRelaxation lp = lp_relax(inst);
    if (lp.status != LpStatus::Optimal) throw std::runtime_error("LP relaxation failed: " + to_string(lp.status));
    res.method = "lp-rounding";
    res.lp_value = lp.value;
    res.x.assign(inst.n, 0);
    res.value = satisfied_weight(inst, res.x);  // all-false is always feasible
    double sum = 0;
    for (int t = 0; t < opt.trials; ++t) {
        Rng rng = Rng::stream(opt.seed, t);
        RoundingDraw d = round_scaled(inst, lp.y, opt.epsilon, rng);
        sum += d.weight;
        if (!d.feasible) continue;
        ++res.feasible_trials;
        if (d.weight > res.value) {
            res.value = d.weight;
            res.x = std::move(d.x);
        }
    }
    res.trials = opt.trials;
    res.mean_weight = sum / opt.trials;
    return res;
}

Frequency violation_frequency(const std::vector<double>& y, int k, double eps, std::uint64_t trials,
                              std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    Rng rng(seed);
    std::uint64_t bad = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        int trues = 0;
        for (double v : y) trues += rng.bernoulli((1.0 - eps) * v);
        bad += trues > k;
    }
    Frequency f;
    f.trials = trials;
    f.freq = static_cast<double>(bad) / static_cast<double>(trials);
    f.stderr_ = std::sqrt(f.freq * (1.0 - f.freq) / static_cast<double>(trials));
    return f;
}

double violation_bound(double eps) { return std::exp((1.0 - 1.0 / eps) / 3.0); }

CnfInstance gen_random_cnf(std::uint64_t seed, int n, int m, int k, int max_len) {
    if (n < 1 || m < 0 || max_len < 1) throw std::invalid_argument("invalid random CNF size");
    Rng rng(seed);
    CnfInstance inst;
    inst.n = n;
    inst.k = std::clamp(k, 0, n);
    std::vector<int> vars(n);
    for (int j = 0; j < n; ++j) vars[j] = j;
    for (int i = 0; i < m; ++i) {
        Clause c;
        const int len = 1 + static_cast<int>(rng.below(std::min(max_len, n)));
        for (int v : rng.sample(vars, len)) (rng.bernoulli(0.5) ? c.pos : c.neg).push_back(v);
        std::sort(c.pos.begin(), c.pos.end());
        std::sort(c.neg.begin(), c.neg.end());
        c.weight = 1.0 + std::floor(10.0 * rng.uniform());
        inst.clauses.push_back(std::move(c));
    }
    return inst;
}

}  // namespace kmr
