#include "kmr/depround.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace kmr {

void RoundingInput::check() const {
    if (p.size() != a.size()) throw std::invalid_argument("p and a differ in length");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0 && p[i] <= 1)) throw std::invalid_argument("p_i outside [0,1]");
        if (!(a[i] > 0)) throw std::invalid_argument("a_i must be positive");
    }
}

RoundingInput RoundingInput::unit(std::vector<double> p) {
    RoundingInput in;
    in.a.assign(p.size(), 1.0);
    in.p = std::move(p);
    return in;
}

double snap01(double v) {
    if (v < kSnap) return 0.0;
    if (v > 1.0 - kSnap) return 1.0;
    return v;
}

SimplifyBranches simplify_branches(double a1, double a2, double b1, double b2) {
    if (!(a1 > 0 && a2 > 0)) throw std::invalid_argument("simplify: weights must be positive");
    if (!(b1 > 0 && b1 < 1 && b2 > 0 && b2 < 1)) throw std::invalid_argument("simplify: betas must lie in (0,1)");
    const double s = a1 * b1 + a2 * b2;
    // Updates after fixing one coordinate to 0 or 1.
    const double g2_if_g1_zero = b2 + b1 * a1 / a2;
    const double g2_if_g1_one = b2 - (1 - b1) * a1 / a2;
    const double g1_if_g2_zero = b1 + b2 * a2 / a1;
    const double g1_if_g2_one = b1 - (1 - b2) * a2 / a1;
    SimplifyBranches out{};
    if (s <= std::min(a1, a2)) {
        const double pr = a2 * b2 / s;
        out.which = SimplifyCase::I;
        out.branch[0] = {pr, 0.0, g2_if_g1_zero};
        out.branch[1] = {1 - pr, g1_if_g2_zero, 0.0};
    } else if (s >= std::max(a1, a2)) {
        const double pr = a2 * (1 - b2) / (a1 * (1 - b1) + a2 * (1 - b2));
        out.which = SimplifyCase::IV;
        out.branch[0] = {pr, 1.0, g2_if_g1_one};
        out.branch[1] = {1 - pr, g1_if_g2_one, 1.0};
    } else if (a1 < a2) {
        out.which = SimplifyCase::II;
        out.branch[0] = {b1, 1.0, g2_if_g1_one};
        out.branch[1] = {1 - b1, 0.0, g2_if_g1_zero};
    } else {
        out.which = SimplifyCase::III;
        out.branch[0] = {b2, g1_if_g2_one, 1.0};
        out.branch[1] = {1 - b2, g1_if_g2_zero, 0.0};
    }
    for (auto& br : out.branch) {
        br.gamma1 = snap01(br.gamma1);
        br.gamma2 = snap01(br.gamma2);
    }
    return out;
}

std::pair<double, double> simplify(double a1, double a2, double b1, double b2, Rng& rng) {
    const SimplifyBranches br = simplify_branches(a1, a2, b1, b2);
    const SimplifyBranch& pick = rng.uniform() < br.branch[0].prob ? br.branch[0] : br.branch[1];
    return {pick.gamma1, pick.gamma2};
}

RoundingOutcome dep_round(const RoundingInput& input, Rng& rng, DepRoundStats* stats) {
    const std::size_t n = input.n();
    RoundingOutcome out;
    out.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.x[i] = snap01(input.p[i]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    auto& x = out.x;
    // `cur` is always the left-most fractional entry in permutation order;
    // every entry before it is already integral.
    std::size_t pos = 0;
    while (pos < n && !is_fractional(x[order[pos]])) ++pos;
    if (pos == n) return out;
    std::size_t cur = order[pos];
    for (std::size_t q = pos + 1; q < n; ++q) {
        const std::size_t e = order[q];
        if (!is_fractional(x[e])) continue;
        auto [g1, g2] = simplify(input.a[cur], input.a[e], x[cur], x[e], rng);
        if (stats) ++stats->simplify_calls;
        x[cur] = g1;
        x[e] = g2;
        if (!is_fractional(x[cur])) {
            if (!is_fractional(x[e])) {
                // Both integral: the next fractional entry, if any, becomes the left-most.
                std::size_t r = q + 1;
                while (r < n && !is_fractional(x[order[r]])) ++r;
                if (r == n) return out;
                cur = order[r];
                q = r;
                continue;
            }
            cur = e;
        }
    }
    if (is_fractional(x[cur])) out.fractional_index = cur;
    return out;
}

ResolvePolicy parse_policy(const std::string& s) {
    if (s == "down") return ResolvePolicy::Down;
    if (s == "up") return ResolvePolicy::Up;
    if (s == "bernoulli") return ResolvePolicy::Bernoulli;
    if (s == "keep") return ResolvePolicy::Keep;
    throw std::invalid_argument("unknown policy: " + s);
}

std::vector<double> resolve_fractional(const RoundingOutcome& outcome, ResolvePolicy policy, Rng& rng) {
    std::vector<double> x = outcome.x;
    if (!outcome.fractional_index) return x;
    double& v = x[*outcome.fractional_index];
    switch (policy) {
        case ResolvePolicy::Down: v = 0; break;
        case ResolvePolicy::Up: v = 1; break;
        case ResolvePolicy::Bernoulli: v = rng.bernoulli(v) ? 1 : 0; break;
        case ResolvePolicy::Keep: break;
    }
    return x;
}

BoundBracket bound_general(double n, double t, double alpha) {
    const double a3 = alpha * alpha * alpha;
    return {1 - 16 * t * (t - 1) / (7 * n * a3), std::pow(1 + 16 * t / (7 * n * a3), t - 1)};
}

BoundBracket bound_uniform(double n, double t, double alpha) {
    const double a2 = alpha * alpha;
    return {1 - 8 * t * (t - 1) / (3 * n * a2), std::pow(1 + 8 * t / (3 * n * a2), t - 1)};
}

BoundBracket bound_unweighted(double n, double t, double q_hat, double alpha_hat) {
    const double den = n * q_hat * alpha_hat;
    return {1 - t * (t - 1) / den, std::pow(1 + t / den, t - 1)};
}

double bound_alt_lower(double n, double t, double alpha, double d) {
    if (!(d >= 1) || d > (n - t) / t) throw std::invalid_argument("d must satisfy 1 <= d <= (n-t)/t");
    const double tail = std::pow(1 - alpha, d);
    if (tail > alpha) throw std::invalid_argument("d must satisfy (1-alpha)^d <= alpha");
    return std::pow(1 - t * d / (n - t), t) * std::pow(1 - tail / alpha, t - 1);
}

int choose_d(double n, double alpha) { return static_cast<int>(std::ceil(std::log(n) / alpha)); }

double NearIndependenceQuery::lambda(const RoundingInput& in) const {
    double v = 1;
    for (auto i : I_plus) v *= in.p[i];
    for (auto i : I_minus) v *= 1 - in.p[i];
    return v;
}

double NearIndependenceQuery::alpha(const RoundingInput& in) {
    double a = 0.5;
    for (double p : in.p) a = std::min(a, std::min(p, 1 - p));
    return a;
}

double NearIndependenceQuery::q_hat(const RoundingInput& in) const {
    double inv = 0;
    for (auto i : I_plus) inv += 1 / in.p[i];
    for (auto i : I_minus) inv += 1 / (1 - in.p[i]);
    return static_cast<double>(t()) / inv;
}

double NearIndependenceQuery::alpha_hat(const RoundingInput& in) const {
    std::vector<char> in_i(in.n(), 0);
    for (auto i : I_plus) in_i[i] = 1;
    for (auto i : I_minus) in_i[i] = 1;
    double s = 0;
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < in.n(); ++j)
        if (!in_i[j]) {
            s += std::min(in.p[j], 1 - in.p[j]);
            ++cnt;
        }
    return cnt ? s / static_cast<double>(cnt) : 0.0;
}

void NearIndependenceQuery::check(std::size_t n) const {
    std::vector<char> seen(n, 0);
    for (const auto* set : {&I_plus, &I_minus})
        for (auto i : *set) {
            if (i >= n) throw std::invalid_argument("query index out of range");
            if (seen[i]) throw std::invalid_argument("I+ and I- must be disjoint");
            seen[i] = 1;
        }
}

double joint_value(const std::vector<double>& x, const NearIndependenceQuery& q) {
    double v = 1;
    for (auto i : q.I_plus) v *= x[i];
    for (auto i : q.I_minus) v *= 1 - x[i];
    return v;
}

Estimate estimate_joint(const RoundingInput& input, const NearIndependenceQuery& query, std::uint64_t trials,
                        ResolvePolicy policy, std::uint64_t seed, int workers) {
    input.check();
    query.check(input.n());
    Estimate est;
    est.trials = trials;
    if (query.t() == 0) {
        est.mean = 1;
        return est;
    }
    if (trials == 0) return est;
    workers = std::max(1, workers);
    std::vector<double> sum(workers, 0), sumsq(workers, 0);
    auto run = [&](int w) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(w));
        const std::uint64_t lo = trials * w / workers, hi = trials * (w + 1) / workers;
        for (std::uint64_t s = lo; s < hi; ++s) {
            RoundingOutcome out = dep_round(input, rng);
            double v = joint_value(resolve_fractional(out, policy, rng), query);
            sum[w] += v;
            sumsq[w] += v * v;
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& th : pool) th.join();
    }
    double s = 0, s2 = 0;
    for (int w = 0; w < workers; ++w) {
        s += sum[w];
        s2 += sumsq[w];
    }
    const double T = static_cast<double>(trials);
    est.mean = s / T;
    const double var = std::max(0.0, s2 / T - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / T);
    return est;
}

namespace {

void enumerate(const RoundingInput& in, const std::vector<std::size_t>& order, std::vector<double>& x, double prob,
               std::map<std::vector<long long>, WeightedOutcome>& acc) {
    std::size_t first = order.size(), second = order.size();
    for (std::size_t q = 0; q < order.size(); ++q) {
        if (!is_fractional(x[order[q]])) continue;
        if (first == order.size()) first = q;
        else {
            second = q;
            break;
        }
    }
    if (second == order.size()) {
        std::vector<long long> key(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) key[i] = std::llround(x[i] * 1e9);
        auto [it, fresh] = acc.try_emplace(key, WeightedOutcome{x, 0.0});
        it->second.prob += prob;
        return;
    }
    const std::size_t i = order[first], j = order[second];
    const SimplifyBranches br = simplify_branches(in.a[i], in.a[j], x[i], x[j]);
    const double xi = x[i], xj = x[j];
    for (const auto& b : br.branch) {
        if (b.prob <= 0) continue;
        x[i] = b.gamma1;
        x[j] = b.gamma2;
        enumerate(in, order, x, prob * b.prob, acc);
    }
    x[i] = xi;
    x[j] = xj;
}

}  // namespace

std::vector<WeightedOutcome> exact_distribution(const RoundingInput& input) {
    input.check();
    const std::size_t n = input.n();
    if (n > 6) throw std::invalid_argument("exact enumeration limited to n <= 6");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    double perms = 1;
    for (std::size_t i = 2; i <= n; ++i) perms *= static_cast<double>(i);
    std::map<std::vector<long long>, WeightedOutcome> acc;
    std::vector<double> start(n);
    for (std::size_t i = 0; i < n; ++i) start[i] = snap01(input.p[i]);
    do {
        std::vector<double> x = start;
        enumerate(input, order, x, 1.0 / perms, acc);
    } while (std::next_permutation(order.begin(), order.end()));
    std::vector<WeightedOutcome> out;
    for (auto& [key, wo] : acc) out.push_back(wo);
    return out;
}

double exact_joint_small(const RoundingInput& input, const NearIndependenceQuery& query) {
    query.check(input.n());
    double v = 0;
    for (const auto& wo : exact_distribution(input)) v += wo.prob * joint_value(wo.x, query);
    return v;
}

}  // namespace kmr
