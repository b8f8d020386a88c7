#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "kmr/bipoint.hpp"
#include "kmr/certify.hpp"
#include "kmr/core.hpp"
#include "kmr/jms.hpp"
#include "kmr/maxsat.hpp"

namespace kmr {

using Json = nlohmann::ordered_json;

// Input error with the source name and, when known, a 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, int line, const std::string& msg);
    int line() const { return line_; }

private:
    int line_;
};

// File helpers; both throw std::runtime_error on IO failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Instance document, version 1:
//   {"format": "kmr-instance", "version": 1, "mode": "euclidean" | "matrix",
//    "facilities": [ids] | count, "clients": [ids] | count, "k": int,
//    "facility_costs": [..] (UFL only), "points": [[x, y], ..] | "matrix": [[..], ..]}
// Points and matrix rows list facilities first, then clients.
Instance parse_instance(const std::string& text, const std::string& source = "<input>");
Instance read_instance(const std::string& path);
std::string instance_to_json(const Instance& inst);

// Rounds to 12 significant digits, the precision of every written distance.
double round12(double v);

Json bipoint_json(const Instance& inst, const BiPointSolution& bp);

struct SolveMeta {
    std::uint64_t seed = 0;
    double eta = 0.05;
    std::string regime;
    double bipoint_cost = 0;
};
Json pseudo_solution_json(const Instance& inst, const PseudoSolution& ps, const SolveMeta& meta);

// Certificate document; +infinity range ends are written as null.
Json certificate_json(const BoundCertificate& cert, bool include_boxes = true);
Json box_json(const ParamBox& box);

// Weighted CNF with a budget line:
//   c comment
//   p wcnf <variables> <clauses>
//   b <cost of true> <cost of false> <budget>
//   <weight> <literal> ... 0
RawCnf parse_wcnf(const std::string& text, const std::string& source = "<input>");
RawCnf read_wcnf(const std::string& path);
std::string wcnf_to_string(const RawCnf& cnf);

}  // namespace kmr
