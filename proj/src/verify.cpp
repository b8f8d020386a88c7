#include "kmr/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "kmr/bipoint.hpp"
#include "kmr/nlp.hpp"

namespace kmr {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body(worker, lo, hi) over `total` items split evenly across workers.
template <class F>
void fan_out(std::uint64_t total, int workers, F&& body) {
    workers = std::max(1, workers);
    if (workers == 1) {
        body(0, std::uint64_t{0}, total);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] { body(w, total * w / workers, total * (w + 1) / workers); });
    for (auto& t : pool) t.join();
}

double sigma(double p, double trials) { return std::sqrt(std::max(0.0, p * (1.0 - p)) / trials); }

}  // namespace

Sampler default_sampler() {
    return [](const RoundingInput& in, Rng& rng) { return dep_round(in, rng); };
}

Sampler faulty_sampler() {
    return [](const RoundingInput& in, Rng& rng) {
        RoundingOutcome out = dep_round(in, rng);
        if (!out.x.empty()) out.x[0] = 1.0;
        return out;
    };
}

std::vector<std::string> depround_suite_plan() {
    return {"simplify-exactness", "depround-invariants", "near-independence", "exact-oracle"};
}

CheckResult check_simplify(std::uint64_t calls, std::uint64_t seed) {
    const auto t0 = Clock::now();
    CheckResult r{"simplify-exactness", true, "", 0};
    Rng rng(seed);
    std::array<std::uint64_t, 4> cases{};
    std::uint64_t bad = 0;
    std::string first;
    for (std::uint64_t c = 0; c < calls; ++c) {
        const double a1 = std::exp(std::log(10.0) * (2.0 * rng.uniform() - 1.0));
        const double a2 = std::exp(std::log(10.0) * (2.0 * rng.uniform() - 1.0));
        const double b1 = std::clamp(rng.uniform(), 1e-6, 1 - 1e-6);
        const double b2 = std::clamp(rng.uniform(), 1e-6, 1 - 1e-6);
        const SimplifyBranches sb = simplify_branches(a1, a2, b1, b2);
        ++cases[static_cast<int>(sb.which)];
        const double mass = a1 * b1 + a2 * b2;
        const double tol = 1e-12 * std::max(1.0, a1 + a2);
        double e1 = 0, e2 = 0, e12 = 0, e00 = 0, psum = 0;
        bool ok = true;
        for (const SimplifyBranch& br : sb.branch) {
            const bool integral = br.gamma1 == 0.0 || br.gamma1 == 1.0 || br.gamma2 == 0.0 || br.gamma2 == 1.0;
            if (br.prob > 0 && !integral) ok = false;                                             // B0
            if (br.prob > 0 && std::fabs(a1 * br.gamma1 + a2 * br.gamma2 - mass) > tol) ok = false;  // B2
            if (br.prob < -1e-15 || br.prob > 1 + 1e-15) ok = false;
            psum += br.prob;
            e1 += br.prob * br.gamma1;
            e2 += br.prob * br.gamma2;
            e12 += br.prob * br.gamma1 * br.gamma2;
            e00 += br.prob * (1 - br.gamma1) * (1 - br.gamma2);
        }
        if (std::fabs(psum - 1) > 1e-12 || std::fabs(e1 - b1) > 1e-12 || std::fabs(e2 - b2) > 1e-12) ok = false;  // B1
        if (e12 > b1 * b2 + 1e-12 || e00 > (1 - b1) * (1 - b2) + 1e-12) ok = false;                             // B3
        // A sampled call must land on one of the two branches.
        const auto [g1, g2] = simplify(a1, a2, b1, b2, rng);
        bool on_branch = false;
        for (const SimplifyBranch& br : sb.branch)
            on_branch = on_branch || (br.prob > 0 && g1 == br.gamma1 && g2 == br.gamma2);
        if (!on_branch) ok = false;
        if (!ok) {
            ++bad;
            if (first.empty()) first = fmt::format(" first failure a=({:.6g},{:.6g}) beta=({:.6g},{:.6g})", a1, a2, b1, b2);
        }
    }
    const bool all_cases = std::all_of(cases.begin(), cases.end(), [](std::uint64_t n) { return n > 0; });
    r.pass = bad == 0 && all_cases;
    r.detail = fmt::format("calls={} cases I/II/III/IV={}/{}/{}/{} failures={}{}", calls, cases[0], cases[1], cases[2],
                           cases[3], bad, first);
    r.seconds = since(t0);
    return r;
}

CheckResult check_depround_invariants(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler) {
    const auto t0 = Clock::now();
    workers = std::max(1, workers);
    std::vector<std::uint64_t> frac_bad(workers, 0), sum_bad(workers, 0);
    std::vector<double> worst(workers, 0.0);
    fan_out(samples, workers, [&](int w, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = Rng::stream(seed, w);
        for (std::uint64_t s = lo; s < hi; ++s) {
            const std::size_t n = 1 + rng.below(50);
            RoundingInput in;
            for (std::size_t i = 0; i < n; ++i) {
                in.p.push_back(rng.uniform());
                in.a.push_back(1.0 + rng.uniform());
            }
            const RoundingOutcome out = sampler(in, rng);
            std::size_t nfrac = 0;
            double before = 0, after = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (is_fractional(out.x[i])) {
                    ++nfrac;
                    if (!out.fractional_index || *out.fractional_index != i) ++frac_bad[w];
                }
                before += in.a[i] * in.p[i];
                after += in.a[i] * out.x[i];
            }
            if (nfrac > 1 || (out.fractional_index && nfrac == 0)) ++frac_bad[w];
            const double dev = std::fabs(before - after);
            worst[w] = std::max(worst[w], dev);
            if (dev > 1e-9) ++sum_bad[w];
        }
    });
    std::uint64_t fb = 0, sb = 0;
    double wd = 0;
    for (int w = 0; w < workers; ++w) {
        fb += frac_bad[w];
        sb += sum_bad[w];
        wd = std::max(wd, worst[w]);
    }
    CheckResult r{"depround-invariants", fb == 0 && sb == 0, "", 0};
    r.detail = fmt::format("samples={} fractional-violations={} sum-violations={} max|dsum|={:.3g}", samples, fb, sb, wd);
    r.seconds = since(t0);
    return r;
}

CheckResult check_near_independence(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler) {
    const auto t0 = Clock::now();
    constexpr std::size_t n = 200;
    constexpr std::size_t pair_span = 20;  // pairwise checks over the first 20 indices
    const RoundingInput in = RoundingInput::unit(std::vector<double>(n, 0.5));
    const std::vector<std::vector<std::size_t>> tuples = {
        {0, 1}, {0, 199}, {57, 123}, {0, 1, 2}, {10, 100, 190}, {0, 1, 2, 3}, {5, 55, 105, 155}};

    // Slot layout: marginals, then every sign pattern of every tuple, then pairs (both one, both zero).
    std::vector<std::size_t> tuple_base;
    std::size_t slots = n;
    for (const auto& t : tuples) {
        tuple_base.push_back(slots);
        slots += std::size_t{1} << t.size();
    }
    const std::size_t pair_base = slots;
    slots += pair_span * pair_span * 2;

    workers = std::max(1, workers);
    std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(slots, 0));
    fan_out(samples, workers, [&](int w, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = Rng::stream(seed, w);
        auto& c = counts[w];
        std::vector<double> x;
        for (std::uint64_t s = lo; s < hi; ++s) {
            x = resolve_fractional(sampler(in, rng), ResolvePolicy::Bernoulli, rng);
            for (std::size_t i = 0; i < n; ++i) c[i] += x[i] > 0.5;
            for (std::size_t q = 0; q < tuples.size(); ++q) {
                std::size_t pattern = 0;
                for (std::size_t b = 0; b < tuples[q].size(); ++b) pattern |= std::size_t{x[tuples[q][b]] > 0.5} << b;
                ++c[tuple_base[q] + pattern];
            }
            for (std::size_t i = 0; i < pair_span; ++i)
                for (std::size_t j = i + 1; j < pair_span; ++j) {
                    const std::size_t k = pair_base + 2 * (i * pair_span + j);
                    c[k] += x[i] > 0.5 && x[j] > 0.5;
                    c[k + 1] += x[i] < 0.5 && x[j] < 0.5;
                }
        }
    });
    std::vector<std::uint64_t> total(slots, 0);
    for (const auto& c : counts)
        for (std::size_t k = 0; k < slots; ++k) total[k] += c[k];

    const double T = static_cast<double>(samples);
    int marginal_bad = 0, joint_bad = 0, pair_bad = 0, joint_tests = 0;
    double worst_ratio_dev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double est = total[i] / T;
        if (std::fabs(est - in.p[i]) > 4 * sigma(in.p[i], T)) ++marginal_bad;
    }
    for (std::size_t q = 0; q < tuples.size(); ++q) {
        const std::size_t t = tuples[q].size();
        for (std::size_t pattern = 0; pattern < (std::size_t{1} << t); ++pattern) {
            NearIndependenceQuery query;
            for (std::size_t b = 0; b < t; ++b) (pattern >> b & 1 ? query.I_plus : query.I_minus).push_back(tuples[q][b]);
            const double lambda = query.lambda(in);
            const BoundBracket br = bound_unweighted(n, t, query.q_hat(in), query.alpha_hat(in));
            const double est = total[tuple_base[q] + pattern] / T;
            const double s = sigma(lambda, T);
            ++joint_tests;
            worst_ratio_dev = std::max(worst_ratio_dev, std::fabs(est / lambda - 1));
            if (est < std::max(0.0, br.lower) * lambda - 4 * s || est > br.upper * lambda + 4 * s) ++joint_bad;
        }
    }
    for (std::size_t i = 0; i < pair_span; ++i)
        for (std::size_t j = i + 1; j < pair_span; ++j) {
            const std::size_t k = pair_base + 2 * (i * pair_span + j);
            const double pp = in.p[i] * in.p[j], qq = (1 - in.p[i]) * (1 - in.p[j]);
            if (total[k] / T > pp + 4 * sigma(pp, T)) ++pair_bad;
            if (total[k + 1] / T > qq + 4 * sigma(qq, T)) ++pair_bad;
        }
    CheckResult r{"near-independence", marginal_bad == 0 && joint_bad == 0 && pair_bad == 0, "", 0};
    r.detail = fmt::format("samples={} marginal-failures={}/{} joint-failures={}/{} pair-failures={}/{} max|est/lambda-1|={:.4f}",
                           samples, marginal_bad, n, joint_bad, joint_tests, pair_bad, pair_span * (pair_span - 1),
                           worst_ratio_dev);
    r.seconds = since(t0);
    return r;
}

CheckResult check_exact_oracle(std::uint64_t samples, std::uint64_t seed, int workers, const Sampler& sampler) {
    const auto t0 = Clock::now();
    const RoundingInput in = RoundingInput::unit({0.3, 0.5, 0.7, 0.5});
    auto key = [](const std::vector<double>& x) {
        std::string k;
        for (double v : x) k += fmt::format("{:.9f},", v);
        return k;
    };
    std::map<std::string, double> exact;
    for (const WeightedOutcome& o : exact_distribution(in)) exact[key(o.x)] += o.prob;

    workers = std::max(1, workers);
    std::vector<std::map<std::string, std::uint64_t>> counts(workers);
    fan_out(samples, workers, [&](int w, std::uint64_t lo, std::uint64_t hi) {
        Rng rng = Rng::stream(seed, w);
        for (std::uint64_t s = lo; s < hi; ++s) ++counts[w][key(sampler(in, rng).x)];
    });
    std::map<std::string, std::uint64_t> total;
    for (const auto& c : counts)
        for (const auto& [k, v] : c) total[k] += v;

    const double T = static_cast<double>(samples);
    int bad = 0, unexpected = 0;
    double worst_z = 0;
    for (const auto& [k, p] : exact) {
        const double est = total.count(k) ? total[k] / T : 0.0;
        const double s = sigma(p, T);
        if (s > 0) worst_z = std::max(worst_z, std::fabs(est - p) / s);
        if (std::fabs(est - p) > 4 * s + 1e-15) ++bad;
    }
    for (const auto& [k, v] : total)
        if (!exact.count(k)) unexpected += v > 0;
    CheckResult r{"exact-oracle", bad == 0 && unexpected == 0, "", 0};
    r.detail = fmt::format("samples={} outcomes={} failures={} unexpected-outcomes={} max|z|={:.2f}", samples,
                           exact.size(), bad, unexpected, worst_z);
    r.seconds = since(t0);
    return r;
}

std::vector<CheckResult> run_depround_suite(const DepRoundSuiteOptions& opt) {
    return {check_simplify(opt.simplify_calls, opt.seed),
            check_depround_invariants(opt.invariant_samples, opt.seed + 1, opt.workers, opt.sampler),
            check_near_independence(opt.joint_samples, opt.seed + 2, opt.workers, opt.sampler),
            check_exact_oracle(opt.oracle_samples, opt.seed + 3, opt.workers, opt.sampler)};
}

namespace {

// Stars of a class with p + q >= 1 must keep the center or every leaf open.
int center_or_leaves_violations(const StarDecomposition& dec, const RoundingParams& params,
                                const std::vector<int>& open) {
    int bad = 0;
    auto is_open = [&](int f) { return std::binary_search(open.begin(), open.end(), f); };
    for (std::size_t s = 0; s < dec.stars.size(); ++s) {
        const StarKind kind = dec.kind[s];
        if (kind == StarKind::C0 || params.p(kind) + params.q(kind) < 1.0 - 1e-12) continue;
        if (is_open(dec.stars[s].center)) continue;
        for (int leaf : dec.stars[s].leaves)
            if (!is_open(leaf)) {
                ++bad;
                break;
            }
    }
    return bad;
}

}  // namespace

BipointQuality measure_bipoint_quality(int instances, std::uint64_t seed, double eta, int workers) {
    struct Row {
        double ratio = 0;
        int cap_bad = 0, budget_bad = 0, col_bad = 0;
        long runs = 0;
    };
    std::vector<Row> rows(instances);
    fan_out(static_cast<std::uint64_t>(instances), workers, [&](int, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            const RegimeInstance ri = synth_regime_instance(Rng::mix(seed + i));
            const StarDecomposition dec = *decompose_stars(ri.inst, ri.bp);
            const std::uint64_t run_seed = Rng::mix(seed ^ (i + 0x5151));
            const PseudoSolution best = run_main_case(ri.inst, dec, eta, run_seed);
            Row& r = rows[i];
            r.ratio = best.connection_cost / ri.bp.cost();
            const auto params = table1(dec.b, dec.s0, eta);
            for (std::size_t a = 0; a < params.size(); ++a) {
                // Same stream as the a-th run inside run_main_case.
                Rng rng = Rng::stream(run_seed, a);
                const std::vector<int> open = algorithm_a_open(dec, params[a], rng);
                const FacilityCap cap = algorithm_a_cap(dec, params[a]);
                r.cap_bad += static_cast<int>(open.size()) > cap.cap;
                r.budget_bad += cap.expected > dec.k + 1 + 1e-9;
                r.col_bad += center_or_leaves_violations(dec, params[a], open);
                ++r.runs;
            }
        }
    });
    BipointQuality q;
    q.instances = instances;
    double s = 0, s2 = 0;
    for (const Row& r : rows) {
        s += r.ratio;
        s2 += r.ratio * r.ratio;
        q.max_ratio = std::max(q.max_ratio, r.ratio);
        q.cap_violations += r.cap_bad;
        q.budget_violations += r.budget_bad;
        q.center_or_leaves_violations += r.col_bad;
        q.runs += r.runs;
    }
    if (instances > 0) {
        q.mean_ratio = s / instances;
        const double var = instances > 1 ? std::max(0.0, (s2 - instances * q.mean_ratio * q.mean_ratio) / (instances - 1)) : 0;
        q.stderr_ = std::sqrt(var / instances);
    }
    return q;
}

CheckResult check_bipoint_quality(int instances, std::uint64_t seed, double eta, int workers) {
    const auto t0 = Clock::now();
    const BipointQuality q = measure_bipoint_quality(instances, seed, eta, workers);
    const double limit = 1.3371 * (1 + eta) + 3 * q.stderr_;
    CheckResult r{"bipoint-quality", false, "", 0};
    r.pass = q.mean_ratio <= limit && q.cap_violations == 0 && q.center_or_leaves_violations == 0;
    r.detail = fmt::format(
        "instances={} mean-ratio={:.4f} stderr={:.4f} limit={:.4f} max-ratio={:.4f} runs={} cap-violations={} "
        "center-or-leaves-violations={} rows-with-E>k+1={}",
        q.instances, q.mean_ratio, q.stderr_, limit, q.max_ratio, q.runs, q.cap_violations,
        q.center_or_leaves_violations, q.budget_violations);
    r.seconds = since(t0);
    return r;
}

CheckResult check_dichotomy_case2(int fixtures, std::uint64_t seed, double eta) {
    const auto t0 = Clock::now();
    int case2 = 0, bad = 0, skipped = 0;
    for (int i = 0; i < fixtures; ++i) {
        const RegimeInstance ri = synth_regime_instance(Rng::mix(seed + 7 * i));
        const StarDecomposition dec = *decompose_stars(ri.inst, ri.bp);
        const auto params = table1(dec.b, dec.s0, eta);
        Rng rng = Rng::stream(seed, i);
        DichotomyOutcome rep;
        const PseudoSolution ps = dichotomy_round(ri.inst, dec, params[1], rng, &rep);
        if (dec.n_l2() > rep.thresholds.g) {
            ++skipped;
            continue;
        }
        ++case2;
        if (rep.which != 2 || ps.connection_cost != ri.bp.d2) ++bad;
    }
    CheckResult r{"dichotomy-case2", bad == 0 && case2 > 0, "", 0};
    r.detail = fmt::format("fixtures={} case2={} mismatches={} skipped={}", fixtures, case2, bad, skipped);
    r.seconds = since(t0);
    return r;
}

namespace {

// Random sub-box of `box` whose widths shrink by a log-uniform factor in [1e-4, 1].
// An unbounded g range is first cut to [lo, lo + 4].
ParamBox random_subbox(const ParamBox& box, Rng& rng) {
    ParamBox out = box;
    for (int i = 0; i < kNumParams; ++i) {
        const double lo = box[i].lo, hi = std::isfinite(box[i].hi) ? box[i].hi : box[i].lo + 4.0;
        const double w = (hi - lo) * std::pow(10.0, -4.0 * rng.uniform());
        const double start = lo + (hi - lo - w) * rng.uniform();
        out[i] = {start, std::min(hi, start + w), false};
    }
    return out;
}

ParamPoint random_point(const ParamBox& box, Rng& rng) {
    ParamPoint pt{};
    for (int i = 0; i < kNumParams; ++i) pt[i] = box[i].lo + (box[i].hi - box[i].lo) * rng.uniform();
    return pt;
}

}  // namespace

CheckResult check_relaxed_boxes(int pairs, std::uint64_t seed) {
    const auto t0 = Clock::now();
    const NlpProgram nlp;
    Rng rng(seed);
    int unsound = 0, nonmonotone = 0, evaluated = 0, unsolved = 0;
    double worst_gap = 0;
    for (int i = 0; i < pairs; ++i) {
        const ParamBox parent = random_subbox(nlp_domain(), rng);
        const ParamBox child = random_subbox(parent, rng);
        const RelaxedResult rp = nlp.relaxed_bound(parent), rc = nlp.relaxed_bound(child);
        // An unsolved relaxation reports +infinity, which is sound but carries no information.
        if (rp.status != LpStatus::Optimal || rc.status != LpStatus::Optimal) {
            ++unsolved;
            continue;
        }
        if (rc.value > rp.value + 1e-9 * std::max(1.0, std::fabs(rp.value))) ++nonmonotone;
        const NlpPointResult pr = nlp.point_eval(random_point(child, rng));
        if (pr.status != LpStatus::Optimal) continue;
        ++evaluated;
        worst_gap = std::max(worst_gap, pr.value - rc.value);
        if (pr.value > rc.value + 1e-9 * std::max(1.0, std::fabs(rc.value))) ++unsound;
    }
    CheckResult r{"relaxed-boxes", unsound == 0 && nonmonotone == 0 && evaluated > 0, "", 0};
    r.detail = fmt::format("pairs={} point_evals={} unsolved={} unsound={} nonmonotone={} worst_point_minus_bound={:.3g}",
                           pairs, evaluated, unsolved, unsound, nonmonotone, worst_gap);
    r.seconds = since(t0);
    return r;
}

}  // namespace kmr
