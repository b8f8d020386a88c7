#include "kmr/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace kmr {

namespace {

std::string where(const std::string& source, int line) {
    return line > 0 ? fmt::format("{}:{}", source, line) : source;
}

int line_at(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the document, 0 when absent.
int key_line(const std::string& text, const std::string& key) {
    const std::size_t pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_at(text, pos);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(where(source, line) + ": " + msg), line_(line) {}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

double round12(double v) { return std::isfinite(v) ? std::stod(fmt::format("{:.12g}", v)) : v; }

Instance parse_instance(const std::string& text, const std::string& source) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(source, line_at(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
    }
    auto fail = [&](const std::string& key, const std::string& msg) -> ParseError {
        return ParseError(source, key_line(text, key), msg);
    };
    if (!doc.is_object()) throw ParseError(source, 1, "instance must be a JSON object");
    if (doc.contains("format") && doc["format"] != "kmr-instance") throw fail("format", "format must be \"kmr-instance\"");
    if (doc.contains("version") && doc["version"] != 1) throw fail("version", "unsupported version (expected 1)");

    auto ids = [&](const char* key, const char* prefix) {
        if (!doc.contains(key)) throw fail(key, fmt::format("missing field \"{}\"", key));
        const Json& v = doc[key];
        std::vector<std::string> out;
        if (v.is_number_integer()) {
            if (v.get<long>() < 0) throw fail(key, fmt::format("\"{}\" count must be nonnegative", key));
            for (long i = 0; i < v.get<long>(); ++i) out.push_back(fmt::format("{}{}", prefix, i));
        } else if (v.is_array()) {
            for (const Json& s : v) {
                if (!s.is_string()) throw fail(key, fmt::format("\"{}\" must list string ids", key));
                out.push_back(s.get<std::string>());
            }
        } else {
            throw fail(key, fmt::format("\"{}\" must be a count or a list of ids", key));
        }
        return out;
    };
    Instance inst;
    inst.facility_ids = ids("facilities", "f");
    inst.client_ids = ids("clients", "c");
    const int n = inst.npoints();

    if (doc.contains("facility_costs")) {
        const Json& v = doc["facility_costs"];
        if (!v.is_array() || static_cast<int>(v.size()) != inst.nf())
            throw fail("facility_costs", "\"facility_costs\" must list one number per facility");
        std::vector<double> costs;
        for (const Json& c : v) {
            if (!c.is_number()) throw fail("facility_costs", "facility costs must be numbers");
            costs.push_back(c.get<double>());
        }
        inst.facility_costs = std::move(costs);
    }
    if (doc.contains("k")) {
        if (!doc["k"].is_number_integer()) throw fail("k", "\"k\" must be an integer");
        inst.k = doc["k"].get<int>();
    } else if (!inst.ufl()) {
        throw ParseError(source, 0, "missing field \"k\"");
    }

    if (!doc.contains("mode") || !doc["mode"].is_string()) throw fail("mode", "\"mode\" must be \"euclidean\" or \"matrix\"");
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "euclidean") {
        inst.mode = Instance::Mode::Euclidean;
        const Json& pts = doc.value("points", Json());
        if (!pts.is_array() || static_cast<int>(pts.size()) != n)
            throw fail("points", fmt::format("\"points\" must list {} coordinate pairs", n));
        for (const Json& p : pts) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw fail("points", "each point must be a pair of numbers");
            inst.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    } else if (mode == "matrix") {
        inst.mode = Instance::Mode::Matrix;
        const Json& rows = doc.value("matrix", Json());
        if (!rows.is_array() || static_cast<int>(rows.size()) != n)
            throw fail("matrix", fmt::format("\"matrix\" must have {} rows", n));
        for (const Json& r : rows) {
            if (!r.is_array() || static_cast<int>(r.size()) != n)
                throw fail("matrix", fmt::format("every matrix row must have {} entries", n));
            for (const Json& d : r) {
                if (!d.is_number()) throw fail("matrix", "matrix entries must be numbers");
                inst.matrix.push_back(d.get<double>());
            }
        }
    } else {
        throw fail("mode", "\"mode\" must be \"euclidean\" or \"matrix\"");
    }

    const ValidationReport rep = validate_instance(inst);
    if (!rep.ok()) {
        const Violation& v = rep.violations.front();
        throw ParseError(source, 0,
                         fmt::format("invalid instance ({} violations), first: {} {}", rep.violations.size(), v.kind,
                                     v.detail));
    }
    return inst;
}

Instance read_instance(const std::string& path) { return parse_instance(read_file(path), path); }

std::string instance_to_json(const Instance& inst) {
    Json doc;
    doc["format"] = "kmr-instance";
    doc["version"] = 1;
    doc["mode"] = inst.mode == Instance::Mode::Euclidean ? "euclidean" : "matrix";
    doc["facilities"] = inst.facility_ids;
    doc["clients"] = inst.client_ids;
    doc["k"] = inst.k;
    if (inst.ufl()) {
        Json costs = Json::array();
        for (double c : *inst.facility_costs) costs.push_back(round12(c));
        doc["facility_costs"] = costs;
    }
    if (inst.mode == Instance::Mode::Euclidean) {
        Json pts = Json::array();
        for (const Point& p : inst.points) pts.push_back({round12(p.x), round12(p.y)});
        doc["points"] = pts;
    } else {
        Json rows = Json::array();
        const int n = inst.npoints();
        for (int u = 0; u < n; ++u) {
            Json r = Json::array();
            for (int v = 0; v < n; ++v) r.push_back(round12(inst.dist(u, v)));
            rows.push_back(r);
        }
        doc["matrix"] = rows;
    }
    return doc.dump(1) + "\n";
}

Json bipoint_json(const Instance& inst, const BiPointSolution& bp) {
    auto names = [&](const std::vector<int>& set) {
        Json out = Json::array();
        for (int i : set) out.push_back(inst.facility_ids[i]);
        return out;
    };
    return Json{{"f1", names(bp.f1)}, {"f2", names(bp.f2)}, {"a", bp.a},      {"b", bp.b},
                {"d1", bp.d1},        {"d2", bp.d2},        {"cost", bp.cost()}};
}

Json pseudo_solution_json(const Instance& inst, const PseudoSolution& ps, const SolveMeta& meta) {
    Json open = Json::array();
    for (int i : ps.open_set) open.push_back(inst.facility_ids[i]);
    Json algos = Json::array();
    for (const auto& [name, cost] : ps.candidates) algos.push_back({{"algorithm", name}, {"connection_cost", cost}});
    Json doc;
    doc["format"] = "kmr-pseudo-solution";
    doc["version"] = 1;
    doc["provenance"] = ps.provenance;
    doc["regime"] = meta.regime;
    doc["seed"] = meta.seed;
    doc["eta"] = meta.eta;
    doc["k"] = inst.k;
    doc["open_set"] = open;
    doc["open_count"] = ps.open_set.size();
    doc["extra"] = ps.extra;
    doc["cap"] = ps.cap;
    doc["connection_cost"] = finite_or_null(ps.connection_cost);
    doc["bipoint_cost"] = meta.bipoint_cost;
    doc["ratio"] = meta.bipoint_cost > 0 ? finite_or_null(ps.connection_cost / meta.bipoint_cost) : Json(nullptr);
    doc["algorithms"] = algos;
    return doc;
}

Json box_json(const ParamBox& box) {
    Json out = Json::object();
    for (int d = 0; d < kNumParams; ++d)
        out[param_name(static_cast<Param>(d))] = {finite_or_null(box[d].lo), finite_or_null(box[d].hi)};
    return out;
}

Json certificate_json(const BoundCertificate& cert, bool include_boxes) {
    Json doc;
    doc["format"] = "kmr-certificate";
    doc["version"] = 1;
    doc["goal"] = cert.goal;
    doc["domain"] = box_json(cert.domain);
    doc["epsilon_policy"] = {{"kind", "relative-outward"}, {"rel_eps", cert.search.policy.rel_eps}};
    doc["nlp"] = {{"grouped", cert.nlp.grouped}, {"reduced", cert.nlp.reduced}, {"prior_work_row", cert.nlp.prior_work_row}};
    doc["search"] = {{"max_boxes", cert.search.max_boxes},
                     {"split_arity", cert.search.split_arity},
                     {"workers", cert.search.workers},
                     {"g_split", cert.search.g_split},
                     {"active", cert.search.active}};
    doc["result"] = cert.certified ? "CERTIFIED" : "FAILED";
    doc["examined"] = cert.examined;
    double max_bound = cert.max_leaf_bound;
    if (cert.witness) max_bound = std::max(max_bound, cert.witness->bound);
    doc["max_bound"] = finite_or_null(max_bound);
    Json depth = Json::object();
    for (const auto& [d, n] : cert.boxes_per_depth) depth[std::to_string(d)] = n;
    doc["boxes_per_depth"] = depth;
    if (cert.witness)
        doc["witness"] = {{"ranges", box_json(cert.witness->box)},
                          {"bound", finite_or_null(cert.witness->bound)},
                          {"depth", cert.witness->depth}};
    else
        doc["witness"] = nullptr;
    doc["runtime_s"] = cert.runtime_s;
    doc["records_truncated"] = cert.records_truncated;
    if (include_boxes) {
        Json boxes = Json::array();
        for (const BoxRecord& r : cert.records)
            boxes.push_back({{"ranges", box_json(r.box)},
                             {"bound", finite_or_null(r.bound)},
                             {"depth", r.depth},
                             {"status", box_status_name(r.status)}});
        doc["boxes"] = boxes;
    }
    return doc;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

bool parse_long(const std::string& s, long& v) {
    try {
        std::size_t used = 0;
        v = std::stol(s, &used);
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_double(const std::string& s, double& v) {
    try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        return used == s.size() && std::isfinite(v);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

RawCnf parse_wcnf(const std::string& text, const std::string& source) {
    RawCnf cnf;
    bool have_header = false, have_budget = false;
    long expected = 0;
    int lineno = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const std::vector<std::string> tok = split_ws(line);
        if (tok.empty() || tok[0] == "c") continue;
        auto fail = [&](const std::string& msg) { return ParseError(source, lineno, msg); };
        if (tok[0] == "p") {
            if (have_header) throw fail("duplicate problem line");
            long n = 0;
            if (tok.size() < 4 || tok.size() > 5 || tok[1] != "wcnf" || !parse_long(tok[2], n) ||
                !parse_long(tok[3], expected) || n < 0 || expected < 0)
                throw fail("expected \"p wcnf <variables> <clauses>\"");
            cnf.n = static_cast<int>(n);
            have_header = true;
            continue;
        }
        if (!have_header) throw fail("data before the problem line");
        if (tok[0] == "b") {
            if (have_budget) throw fail("duplicate budget line");
            if (tok.size() != 4 || !parse_double(tok[1], cnf.a_cost) || !parse_double(tok[2], cnf.b_cost) ||
                !parse_double(tok[3], cnf.budget))
                throw fail("expected \"b <cost of true> <cost of false> <budget>\"");
            if (cnf.a_cost < 0 || cnf.b_cost < 0) throw fail("costs must be nonnegative");
            have_budget = true;
            continue;
        }
        Clause c;
        if (!parse_double(tok[0], c.weight) || c.weight < 0) throw fail("clause weight must be a nonnegative number");
        if (tok.back() != "0") throw fail("clause must end with 0 on the same line");
        for (std::size_t t = 1; t + 1 < tok.size(); ++t) {
            long lit = 0;
            if (!parse_long(tok[t], lit) || lit == 0) throw fail(fmt::format("bad literal \"{}\"", tok[t]));
            if (std::labs(lit) > cnf.n) throw fail(fmt::format("literal {} exceeds the variable count {}", lit, cnf.n));
            (lit > 0 ? c.pos : c.neg).push_back(static_cast<int>(std::labs(lit) - 1));
        }
        for (auto* v : {&c.pos, &c.neg}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }
        for (int v : c.pos)
            if (std::binary_search(c.neg.begin(), c.neg.end(), v))
                throw fail(fmt::format("variable {} appears in both signs", v + 1));
        cnf.clauses.push_back(std::move(c));
    }
    if (!have_header) throw ParseError(source, lineno, "missing problem line");
    if (static_cast<long>(cnf.clauses.size()) != expected)
        throw ParseError(source, lineno,
                         fmt::format("problem line announces {} clauses, found {}", expected, cnf.clauses.size()));
    if (!have_budget) {
        // No budget line: cardinality budget n, i.e. unconstrained.
        cnf.a_cost = 1;
        cnf.b_cost = 0;
        cnf.budget = cnf.n;
    }
    return cnf;
}

RawCnf read_wcnf(const std::string& path) { return parse_wcnf(read_file(path), path); }

std::string wcnf_to_string(const RawCnf& cnf) {
    std::string out = fmt::format("p wcnf {} {}\nb {} {} {}\n", cnf.n, cnf.clauses.size(), cnf.a_cost, cnf.b_cost, cnf.budget);
    for (const Clause& c : cnf.clauses) {
        out += fmt::format("{}", c.weight);
        for (int v : c.pos) out += fmt::format(" {}", v + 1);
        for (int v : c.neg) out += fmt::format(" -{}", v + 1);
        out += " 0\n";
    }
    return out;
}

}  // namespace kmr
