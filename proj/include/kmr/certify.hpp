#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmr/nlp.hpp"

namespace kmr {

enum class BoxStatus { Certified, Split, Failed };
const char* box_status_name(BoxStatus s);

struct BoxRecord {
    ParamBox box;
    double bound = 0;
    int depth = 0;
    BoxStatus status = BoxStatus::Split;
};

struct SearchOptions {
    double goal = 1.3371;
    long max_boxes = 10000;
    int split_arity = 16;  // power of two up to 16
    int workers = 1;
    double g_split = 64.0;  // first split point for an unbounded g range
    long record_cap = 200000;  // stop storing per-box records past this count
    IntervalPolicy policy;
    std::uint32_t active = NlpProgram::kAllAlgorithms;
};

struct BoundCertificate {
    double goal = 0;
    ParamBox domain{};
    NlpOptions nlp;
    SearchOptions search;
    bool certified = false;
    long examined = 0;
    double max_leaf_bound = 0;  // largest bound among certified leaves
    std::map<int, long> boxes_per_depth;
    std::vector<BoxRecord> records;  // in traversal order
    bool records_truncated = false;
    std::optional<BoxRecord> witness;  // set when FAILED
    double runtime_s = 0;
};

// Splits a box into `arity` children (fewer when some dimensions cannot be split).
std::vector<ParamBox> split_box(const ParamBox& box, int arity, double g_split);

// Breadth-first search over boxes with deterministic ordering; each batch of
// boxes at one depth is bounded in parallel and merged in index order.
BoundCertificate interval_search(const NlpProgram& nlp, const ParamBox& root, const SearchOptions& opt);

}  // namespace kmr
