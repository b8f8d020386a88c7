// kmround: command-line driver for the k-median rounding pipeline, the
// dependent-rounding verification suite, the NLP certifier and the MAX-SAT rounder.
//
// Exit codes: 0 success, 1 verdict failure, 2 usage or IO error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "kmr/bipoint.hpp"
#include "kmr/certify.hpp"
#include "kmr/core.hpp"
#include "kmr/io.hpp"
#include "kmr/jms.hpp"
#include "kmr/maxsat.hpp"
#include "kmr/nlp.hpp"
#include "kmr/verify.hpp"

using namespace kmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::string format = "table";
    std::string out;
    int workers = 1;

    std::uint64_t effective_seed() {
        if (!seed) {
            std::random_device rd;
            seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        return *seed;
    }
};

// Key/value rows plus pass/fail checks, printed in one of the three formats.
class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void add(const std::string& key, Json value) { rows_.emplace_back(key, std::move(value)); }
    void check(const CheckResult& c) { checks_.push_back(c); }
    bool pass() const {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return true;
    }

    void print(const std::string& format, std::ostream& os) const {
        if (format == "machine") {
            Json doc;
            doc["format"] = "kmr-report";
            doc["version"] = 1;
            doc["command"] = command_;
            Json values = Json::object();
            for (const auto& [k, v] : rows_) values[k] = v;
            doc["values"] = values;
            Json checks = Json::array();
            for (const auto& c : checks_) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            doc["checks"] = checks;
            doc["verdict"] = pass() ? "PASS" : "FAIL";
            os << doc.dump(1) << "\n";
        } else if (format == "csv") {
            os << "key,value\n";
            for (const auto& [k, v] : rows_) os << k << "," << csv_field(text(v)) << "\n";
            for (const auto& c : checks_)
                os << "check:" << c.name << "," << csv_field(fmt::format("{} {}", c.pass ? "PASS" : "FAIL", c.detail))
                   << "\n";
        } else {
            std::size_t width = 0;
            for (const auto& [k, v] : rows_) width = std::max(width, k.size());
            for (const auto& [k, v] : rows_) os << fmt::format("{:<{}}  {}\n", k, width, text(v));
            for (const auto& c : checks_)
                os << fmt::format("{} {} ({:.2f}s): {}\n", c.pass ? "PASS" : "FAIL", c.name, c.seconds, c.detail);
        }
    }

private:
    static std::string text(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) return fmt::format("{:.10g}", v.get<double>());
        return v.dump();
    }
    static std::string csv_field(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        return out + "\"";
    }

    std::string command_;
    std::vector<std::pair<std::string, Json>> rows_;
    std::vector<CheckResult> checks_;
};

int finish(const Report& rep, const RunConfig& cfg) {
    rep.print(cfg.format, std::cout);
    return rep.pass() ? kExitOk : kExitVerdict;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json id_list(const std::vector<std::string>& ids, const std::vector<int>& idx) {
    Json out = Json::array();
    for (int i : idx) out.push_back(ids[i]);
    return out;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool randomized) {
    if (randomized) sub->add_option("--seed", cfg.seed, "Random seed (auto-generated and printed when omitted)");
    sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"table", "csv", "machine"}));
    sub->add_option("--out", cfg.out, "Output file");
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::Range(1, 1024));
}

// ---- gen ----

struct GenArgs {
    std::string kind = "random";
    int nf = 10, nc = 30, k = 3;
    std::string metric = "euclidean";
    std::optional<double> facility_cost;
    double f1 = 0.5, f2 = 1.5, alpha = 1.0;
    double gamma = 1.1;
};

int cmd_gen(const GenArgs& g, RunConfig& cfg) {
    Report rep("gen");
    std::string text;
    if (g.kind == "random" || g.kind == "euclidean") {
        const std::uint64_t seed = cfg.effective_seed();
        rep.add("seed", seed);
        const GenMode mode = g.kind == "euclidean" || g.metric == "euclidean" ? GenMode::Euclidean : GenMode::ClosedRandom;
        Instance inst = gen_random_instance(seed, g.nf, g.nc, g.k, mode);
        if (g.facility_cost) inst = with_uniform_cost(inst, *g.facility_cost);
        text = instance_to_json(inst);
        rep.add("facilities", inst.nf());
        rep.add("clients", inst.nc());
        rep.add("k", inst.k);
    } else if (g.kind == "lb-family") {
        LowerBoundFamilyParams p{g.f1, g.f2, g.alpha, g.k};
        p.check();
        const Instance inst = gen_lower_bound_family(p);
        Json doc = Json::parse(instance_to_json(inst));
        doc["family"] = {{"kind", "lower-bound"}, {"f1", p.f1}, {"f2", p.f2}, {"alpha", p.alpha}, {"k", p.k}};
        text = doc.dump(1) + "\n";
        rep.add("facilities", inst.nf());
        rep.add("clients", inst.nc());
        rep.add("k", inst.k);
        rep.add("analytic_ratio", analytic_lb_ratio(p));
    } else if (g.kind == "jms-counterexample") {
        const Instance inst = gen_jms_counterexample(g.k, g.gamma);
        text = instance_to_json(inst);
        rep.add("facilities", inst.nf());
        rep.add("clients", inst.nc());
        rep.add("gamma", g.gamma);
    } else if (g.kind == "regime") {
        const std::uint64_t seed = cfg.effective_seed();
        rep.add("seed", seed);
        const RegimeInstance ri = synth_regime_instance(seed);
        Json doc = Json::parse(instance_to_json(ri.inst));
        doc["bipoint"] = bipoint_json(ri.inst, ri.bp);
        text = doc.dump(1) + "\n";
        rep.add("facilities", ri.inst.nf());
        rep.add("clients", ri.inst.nc());
        rep.add("k", ri.inst.k);
        rep.add("rejected_draws", ri.rejected);
    } else {
        throw CLI::ValidationError("gen", "unknown kind " + g.kind);
    }
    if (cfg.out.empty()) {
        // The instance owns stdout; the seed goes to stderr.
        if (cfg.seed) std::cerr << "seed: " << *cfg.seed << "\n";
        std::cout << text;
        return kExitOk;
    }
    write_file(cfg.out, text);
    rep.add("out", cfg.out);
    return finish(rep, cfg);
}

// ---- solve ----

// Bi-point stored next to an instance (as `gen regime` writes it); distances are recomputed.
BiPointSolution bipoint_from_json(const Instance& inst, const Json& j, const std::string& source) {
    auto index = [&](const Json& ids) {
        std::vector<int> out;
        for (const Json& id : ids) {
            const auto it = std::find(inst.facility_ids.begin(), inst.facility_ids.end(), id.get<std::string>());
            if (it == inst.facility_ids.end())
                throw ParseError(source, 0, "bipoint names unknown facility " + id.get<std::string>());
            out.push_back(static_cast<int>(it - inst.facility_ids.begin()));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    BiPointSolution bp;
    bp.f1 = index(j.at("f1"));
    bp.f2 = index(j.at("f2"));
    bp.a = j.at("a").get<double>();
    bp.b = j.at("b").get<double>();
    bp.d1 = connection_cost(inst, bp.f1);
    bp.d2 = connection_cost(inst, bp.f2);
    const auto problems = check_bipoint(inst, bp);
    if (!problems.empty()) throw ParseError(source, 0, "invalid bipoint: " + problems.front());
    return bp;
}

int cmd_solve(const std::string& path, double eta, RunConfig& cfg) {
    const std::string text = read_file(path);
    const Instance inst = parse_instance(text, path);
    if (!(eta > 0 && eta < 1)) throw CLI::ValidationError("--eta", "must lie in (0, 1)");
    const std::uint64_t seed = cfg.effective_seed();
    const Json raw = Json::parse(text);
    const bool stored = raw.contains("bipoint");
    const BiPointSolution bp = stored ? bipoint_from_json(inst, raw["bipoint"], path) : build_bipoint(inst).bp;
    const DispatchResult res = edge_dispatch(inst, bp, eta, seed);

    SolveMeta meta{seed, eta, regime_name(res.regime), bp.cost()};
    Json doc = pseudo_solution_json(inst, res.solution, meta);
    doc["bipoint"] = bipoint_json(inst, bp);

    Report rep("solve");
    rep.add("seed", seed);
    rep.add("instance", path);
    rep.add("bipoint_source", stored ? "file" : "jms");
    rep.add("regime", meta.regime);
    rep.add("provenance", res.solution.provenance);
    rep.add("k", inst.k);
    rep.add("open_count", res.solution.open_set.size());
    rep.add("extra", res.solution.extra);
    rep.add("cap", res.solution.cap);
    rep.add("bipoint_cost", bp.cost());
    rep.add("connection_cost", finite_or_null(res.solution.connection_cost));
    rep.add("ratio", bp.cost() > 0 ? finite_or_null(res.solution.connection_cost / bp.cost()) : Json(nullptr));

    // Instances written by `gen lb-family` carry their parameters.
    if (raw.contains("family") && raw["family"].value("kind", "") == "lower-bound") {
        const Json& f = raw["family"];
        const LowerBoundFamilyParams p{f.at("f1").get<double>(), f.at("f2").get<double>(), f.at("alpha").get<double>(),
                                       f.at("k").get<int>()};
        rep.add("analytic_ratio", analytic_lb_ratio(p));
        doc["analytic_ratio"] = analytic_lb_ratio(p);
    }
    if (!cfg.out.empty()) {
        write_file(cfg.out, doc.dump(1) + "\n");
        rep.add("out", cfg.out);
    }
    return finish(rep, cfg);
}

// ---- verify-depround / verify-bipoint ----

int cmd_verify_depround(std::uint64_t trials, bool inject_fault, RunConfig& cfg) {
    Report rep("verify-depround");
    const std::uint64_t seed = cfg.effective_seed();
    rep.add("seed", seed);
    if (trials == 0) {
        rep.add("mode", "dry-run");
        Json plan = Json::array();
        for (const auto& name : depround_suite_plan()) plan.push_back(name);
        rep.add("plan", plan);
        return finish(rep, cfg);
    }
    DepRoundSuiteOptions opt;
    opt.seed = seed;
    opt.simplify_calls = std::max<std::uint64_t>(1, trials / 10);
    opt.invariant_samples = opt.joint_samples = opt.oracle_samples = trials;
    opt.workers = cfg.workers;
    if (inject_fault) opt.sampler = faulty_sampler();
    rep.add("trials", trials);
    rep.add("workers", cfg.workers);
    if (inject_fault) rep.add("sampler", "faulty");
    for (const CheckResult& c : run_depround_suite(opt)) rep.check(c);
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot write " + cfg.out);
        rep.print("machine", f);
    }
    return finish(rep, cfg);
}

int cmd_verify_bipoint(int instances, double eta, RunConfig& cfg) {
    Report rep("verify-bipoint");
    const std::uint64_t seed = cfg.effective_seed();
    rep.add("seed", seed);
    rep.add("instances", instances);
    rep.add("eta", eta);
    rep.check(check_bipoint_quality(instances, seed, eta, cfg.workers));
    rep.check(check_dichotomy_case2(20, seed, eta));
    return finish(rep, cfg);
}

// ---- certify ----

struct CertifyArgs {
    double goal = 1.3371;
    std::optional<long> budget;
    bool full = false;
    std::string domain = "tight";
    double half_width = 1e-4;
    bool reduced = false;
    bool include_boxes = false;
};

int cmd_certify(const CertifyArgs& a, RunConfig& cfg) {
    NlpOptions nopt;
    nopt.reduced = a.reduced;
    const NlpProgram nlp(nopt);
    SearchOptions sopt;
    sopt.goal = a.goal;
    sopt.workers = cfg.workers;
    sopt.max_boxes = a.budget.value_or(a.full ? 20000000L : 10000L);
    const bool whole = a.full || a.domain == "full";
    const ParamBox root = whole ? nlp_domain() : tight_point_box(a.half_width);
    const BoundCertificate cert = interval_search(nlp, root, sopt);

    Report rep("certify");
    rep.add("goal", a.goal);
    rep.add("domain", whole ? "full" : fmt::format("tight-point half-width {}", a.half_width));
    rep.add("budget", sopt.max_boxes);
    rep.add("examined", cert.examined);
    rep.add("max_bound", finite_or_null(cert.max_leaf_bound));
    if (cert.witness) {
        rep.add("witness", box_json(cert.witness->box));
        rep.add("witness_bound", finite_or_null(cert.witness->bound));
    }
    rep.add("runtime_s", cert.runtime_s);
    rep.check({"certificate", cert.certified, cert.certified ? "CERTIFIED" : "FAILED", cert.runtime_s});
    if (!cfg.out.empty()) {
        write_file(cfg.out, certificate_json(cert, a.include_boxes).dump(1) + "\n");
        rep.add("out", cfg.out);
    }
    return finish(rep, cfg);
}

// ---- maxsat ----

int cmd_maxsat(const std::string& path, double epsilon, int trials, RunConfig& cfg) {
    const RawCnf raw = read_wcnf(path);
    const CnfInstance inst = normalize_budget(raw);
    MaxSatOptions opt;
    opt.epsilon = epsilon;
    opt.trials = trials;
    opt.seed = cfg.effective_seed();
    const MaxSatResult res = solve_maxsat(inst, opt);
    const std::vector<char> x = to_raw_assignment(inst, res.x);

    Report rep("maxsat");
    rep.add("seed", opt.seed);
    rep.add("variables", inst.n);
    rep.add("clauses", inst.clauses.size());
    rep.add("k", inst.k);
    rep.add("complemented", inst.complemented);
    rep.add("method", res.method);
    rep.add("value", res.value);
    rep.add("total_weight", total_weight(inst));
    if (res.method == "lp-rounding") {
        rep.add("lp_value", res.lp_value);
        rep.add("trials", res.trials);
        rep.add("feasible_trials", res.feasible_trials);
        rep.add("mean_weight", res.mean_weight);
    }
    Json trues = Json::array();
    for (int j = 0; j < inst.n; ++j)
        if (x[j]) trues.push_back(j + 1);
    rep.add("true_variables", trues);
    if (!cfg.out.empty()) {
        Json doc{{"format", "kmr-maxsat-solution"}, {"version", 1}, {"seed", opt.seed}, {"method", res.method},
                 {"value", res.value},          {"k", inst.k},    {"true_variables", trues}};
        write_file(cfg.out, doc.dump(1) + "\n");
        rep.add("out", cfg.out);
    }
    return finish(rep, cfg);
}

// ---- jms ----

// Structural checks on the counterexample run: f' and every per-copy facility
// open, and closing f' strictly lowers the total cost.
void counterexample_checks(const Instance& inst, const JmsResult& r, Report& rep) {
    const auto& open = r.solution.open_set;
    const bool all_open = static_cast<int>(open.size()) == inst.nf();
    std::vector<int> without;
    double fac = 0;
    for (int i = 1; i < inst.nf(); ++i) {
        without.push_back(i);
        fac += (*inst.facility_costs)[i];
    }
    const double closed_total = fac + connection_cost(inst, without);
    rep.add("total_with_f_prime_closed", closed_total);
    rep.check({"all-facilities-open", all_open, fmt::format("opened {} of {}", open.size(), inst.nf()), 0});
    rep.check({"closing-f-prime-improves", closed_total < r.total_cost,
               fmt::format("{:.6f} < {:.6f}", closed_total, r.total_cost), 0});
}

int cmd_jms(const std::string& path, int ce_k, double gamma, RunConfig& cfg) {
    Report rep("jms");
    Instance inst;
    if (ce_k > 0) {
        inst = gen_jms_counterexample(ce_k, gamma);
        rep.add("instance", fmt::format("counterexample k={} gamma={}", ce_k, gamma));
    } else {
        if (path.empty()) throw CLI::ValidationError("jms", "an instance path or --counterexample is required");
        inst = read_instance(path);
        rep.add("instance", path);
    }
    Json out;
    if (inst.ufl()) {
        const JmsResult r = jms_run(inst, gamma);
        rep.add("gamma", gamma);
        rep.add("open_set", id_list(inst.facility_ids, r.solution.open_set));
        rep.add("facility_cost", r.facility_cost);
        rep.add("connection_cost", r.solution.connection_cost);
        rep.add("total_cost", r.total_cost);
        rep.add("events", r.events);
        rep.add("max_open_gap", r.max_open_gap);
        rep.check({"budgets-monotone", r.budgets_monotone, "", 0});
        if (ce_k > 0) counterexample_checks(inst, r, rep);
        Json duals = Json::object(), times = Json::object();
        for (int j = 0; j < inst.nc(); ++j) duals[inst.client_ids[j]] = r.alpha[j];
        for (int i = 0; i < inst.nf(); ++i) times[inst.facility_ids[i]] = r.open_time[i] < 0 ? Json(nullptr) : Json(r.open_time[i]);
        out = {{"format", "kmr-jms-run"}, {"version", 1}, {"gamma", gamma}, {"open_set", id_list(inst.facility_ids, r.solution.open_set)},
               {"total_cost", r.total_cost}, {"alpha", duals}, {"open_time", times}};
    } else {
        const BiPointBuild b = build_bipoint(inst);
        const auto problems = check_bipoint(inst, b.bp);
        const Json bp = bipoint_json(inst, b.bp);
        for (const auto& [k, v] : bp.items()) rep.add(k, v);
        rep.add("probes", b.probes);
        rep.add("exact", b.exact);
        rep.check({"bipoint-valid", problems.empty(), problems.empty() ? "" : problems.front(), 0});
        out = {{"format", "kmr-bipoint"}, {"version", 1}, {"bipoint", bp}};
    }
    if (!cfg.out.empty()) {
        write_file(cfg.out, out.dump(1) + "\n");
        rep.add("out", cfg.out);
    }
    return finish(rep, cfg);
}

// ---- factor-lp ----

int cmd_factor_lp(int kmax, RunConfig& cfg) {
    Report rep("factor-lp");
    Json values = Json::array();
    double prev = 0;
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= kmax; ++k) {
        const FactorLpResult r = jms_factor_lp(k);
        if (r.status != LpStatus::Optimal) {
            ok = false;
            detail = fmt::format("k={} status {}", k, to_string(r.status));
            break;
        }
        values.push_back(r.value);
        rep.add(fmt::format("b_{}", k), r.value);
        if ((k == 1 && std::fabs(r.value - 1) > 1e-9) || r.value < prev - 1e-9 || r.value > 1.61) {
            ok = false;
            if (detail.empty()) detail = fmt::format("k={} value {:.6f}", k, r.value);
        }
        prev = r.value;
    }
    rep.check({"factor-lp", ok, ok ? "b_1 = 1, nondecreasing, at most 1.61" : detail, 0});
    if (!cfg.out.empty()) {
        write_file(cfg.out, Json{{"format", "kmr-factor-lp"}, {"version", 1}, {"b", values}}.dump(1) + "\n");
        rep.add("out", cfg.out);
    }
    return finish(rep, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-median bi-point rounding, dependent rounding verification and NLP certification"};
    app.require_subcommand(1);
    RunConfig cfg;
    int exit_code = kExitOk;

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate an instance");
    g->add_option("kind", gen.kind, "random | euclidean | lb-family | jms-counterexample | regime")
        ->check(CLI::IsMember({"random", "euclidean", "lb-family", "jms-counterexample", "regime"}));
    g->add_option("--nf", gen.nf, "Facilities")->check(CLI::PositiveNumber);
    g->add_option("--nc", gen.nc, "Clients")->check(CLI::PositiveNumber);
    g->add_option("--k", gen.k, "Budget k (copy size for jms-counterexample)")->check(CLI::PositiveNumber);
    g->add_option("--metric", gen.metric, "Metric of random instances")->check(CLI::IsMember({"euclidean", "matrix"}));
    g->add_option("--facility-cost", gen.facility_cost, "Uniform facility cost (UFL instance)");
    g->add_option("--f1", gen.f1, "Lower-bound family f1");
    g->add_option("--f2", gen.f2, "Lower-bound family f2");
    g->add_option("--alpha", gen.alpha, "Lower-bound family alpha");
    g->add_option("--gamma", gen.gamma, "Counterexample gamma");
    add_common(g, cfg, true);
    g->callback([&] { exit_code = cmd_gen(gen, cfg); });

    std::string solve_path;
    double eta = 0.05;
    auto* s = app.add_subcommand("solve", "Bi-point construction and rounding to a pseudo-solution");
    s->add_option("instance", solve_path, "Instance file")->required();
    s->add_option("--eta", eta, "Rounding accuracy parameter");
    add_common(s, cfg, true);
    s->callback([&] { exit_code = cmd_solve(solve_path, eta, cfg); });

    std::uint64_t dr_trials = 1000000;
    bool inject_fault = false;
    auto* vd = app.add_subcommand("verify-depround", "Statistical and exact checks of dependent rounding");
    vd->add_option("--trials", dr_trials, "Samples per sampling check (0 lists the plan)");
    vd->add_flag("--inject-fault", inject_fault)->group("");
    add_common(vd, cfg, true);
    vd->callback([&] { exit_code = cmd_verify_depround(dr_trials, inject_fault, cfg); });

    int bp_trials = 200;
    auto* vb = app.add_subcommand("verify-bipoint", "Rounding quality on synthesized main-regime instances");
    vb->add_option("--trials", bp_trials, "Instances")->check(CLI::PositiveNumber);
    vb->add_option("--eta", eta, "Rounding accuracy parameter");
    add_common(vb, cfg, true);
    vb->callback([&] { exit_code = cmd_verify_bipoint(bp_trials, eta, cfg); });

    CertifyArgs cert;
    auto* c = app.add_subcommand("certify", "Interval certification of the factor-revealing program");
    c->add_option("--goal", cert.goal, "Bound to certify");
    c->add_option("--budget", cert.budget, "Maximum boxes examined")->check(CLI::PositiveNumber);
    c->add_flag("--full", cert.full, "Whole domain with a paper-scale budget");
    c->add_option("--domain", cert.domain, "tight | full")->check(CLI::IsMember({"tight", "full"}));
    c->add_option("--half-width", cert.half_width, "Half-width of the box around the tight point");
    c->add_flag("--reduced", cert.reduced, "Merge P/N subclasses outside (1B,2)");
    c->add_flag("--boxes", cert.include_boxes, "Write every examined box into the certificate");
    add_common(c, cfg, false);
    c->callback([&] { exit_code = cmd_certify(cert, cfg); });

    std::string cnf_path;
    double epsilon = 0.1;
    int ms_trials = 1000;
    auto* m = app.add_subcommand("maxsat", "Budgeted MAX-SAT by LP rounding");
    m->add_option("formula", cnf_path, "WCNF file with budget line")->required();
    m->add_option("--epsilon", epsilon, "Scaling parameter");
    m->add_option("--trials", ms_trials, "Rounding draws")->check(CLI::PositiveNumber);
    add_common(m, cfg, true);
    m->callback([&] { exit_code = cmd_maxsat(cnf_path, epsilon, ms_trials, cfg); });

    std::string jms_path;
    int ce_k = 0;
    double gamma = 1.0;
    auto* j = app.add_subcommand("jms", "Primal-dual UFL run or bi-point construction");
    j->add_option("instance", jms_path, "Instance file");
    j->add_option("--counterexample", ce_k, "Run on the generated counterexample with this k")->check(CLI::Range(2, 1000));
    j->add_option("--gamma", gamma, "Offer scaling (>= 1)");
    add_common(j, cfg, false);
    j->callback([&] {
        exit_code = cmd_jms(jms_path, ce_k, ce_k > 0 && j->count("--gamma") == 0 ? 1.1 : gamma, cfg);
    });

    int kmax = 15;
    auto* f = app.add_subcommand("factor-lp", "Factor-revealing LP values b_1..b_k");
    f->add_option("--k", kmax, "Largest k")->check(CLI::Range(1, 40));
    add_common(f, cfg, false);
    f->callback([&] { exit_code = cmd_factor_lp(kmax, cfg); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return exit_code;
}
