#include "kmr/certify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace kmr {

const char* box_status_name(BoxStatus s) {
    switch (s) {
        case BoxStatus::Certified: return "certified";
        case BoxStatus::Split: return "split";
        case BoxStatus::Failed: return "failed";
    }
    return "?";
}

std::vector<ParamBox> split_box(const ParamBox& box, int arity, double g_split) {
    if (arity < 1 || arity > 16 || (arity & (arity - 1)) != 0)
        throw std::invalid_argument("split arity must be a power of two up to 16");
    int want = 0;
    while ((1 << want) < arity) ++want;

    // Candidate dimensions with a split point; unbounded g splits once at g_split.
    struct Cand {
        int dim;
        double mid;
        double rel;
    };
    const ParamBox dom = nlp_domain();
    std::vector<Cand> cands;
    for (int d = 0; d < kNumParams; ++d) {
        const Interval& iv = box[d];
        if (!std::isfinite(iv.hi)) {
            if (iv.lo < g_split) cands.push_back({d, g_split, std::numeric_limits<double>::infinity()});
            continue;
        }
        if (iv.hi <= iv.lo) continue;
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (mid <= iv.lo || mid >= iv.hi) continue;
        const double scale = std::isfinite(dom[d].width()) ? dom[d].width() : g_split;
        cands.push_back({d, mid, iv.width() / scale});
    }
    // Widest relative dimensions first; the stable sort keeps the parameter order on ties.
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.rel > b.rel; });
    if (static_cast<int>(cands.size()) > want) cands.resize(want);
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.dim < b.dim; });

    std::vector<ParamBox> out{box};
    for (const Cand& c : cands) {
        std::vector<ParamBox> next;
        for (const ParamBox& b : out) {
            ParamBox lo = b, hi = b;
            lo[c.dim].hi = c.mid;
            hi[c.dim].lo = c.mid;
            next.push_back(lo);
            next.push_back(hi);
        }
        out.swap(next);
    }
    if (out.size() == 1) out.clear();
    return out;
}

BoundCertificate interval_search(const NlpProgram& nlp, const ParamBox& root, const SearchOptions& opt) {
    if (!(opt.goal > 0)) throw std::invalid_argument("goal must be positive");
    if (opt.max_boxes < 1) throw std::invalid_argument("max_boxes must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    BoundCertificate cert;
    cert.goal = opt.goal;
    cert.domain = root;
    cert.nlp = nlp.options();
    cert.search = opt;

    struct Item {
        ParamBox box;
        int depth;
    };
    std::vector<Item> level{{root, 0}};
    bool failed = false;
    auto fail_with = [&](const BoxRecord& r) {
        failed = true;
        if (!cert.witness || r.depth > cert.witness->depth ||
            (r.depth == cert.witness->depth && r.bound > cert.witness->bound))
            cert.witness = r;
    };
    std::optional<BoxRecord> last_split;
    auto record = [&](const BoxRecord& r) {
        if (r.status == BoxStatus::Split) last_split = r;
        if (static_cast<long>(cert.records.size()) < opt.record_cap) cert.records.push_back(r);
        else cert.records_truncated = true;
    };

    while (!level.empty() && !failed) {
        const long remaining = opt.max_boxes - cert.examined;
        const std::size_t take = std::min<std::size_t>(level.size(), static_cast<std::size_t>(std::max(0L, remaining)));
        std::vector<double> bounds(take, 0.0);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next++; i < take; i = next++)
                bounds[i] = nlp.relaxed_bound(level[i].box, opt.active, opt.policy).value;
        };
        const int nw = std::max(1, std::min<int>(opt.workers, static_cast<int>(take)));
        std::vector<std::thread> pool;
        for (int w = 1; w < nw; ++w) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();

        std::vector<Item> children;
        for (std::size_t i = 0; i < take; ++i) {
            BoxRecord r{level[i].box, bounds[i], level[i].depth, BoxStatus::Certified};
            ++cert.examined;
            ++cert.boxes_per_depth[r.depth];
            if (r.bound <= opt.goal) {
                cert.max_leaf_bound = std::max(cert.max_leaf_bound, r.bound);
                record(r);
                continue;
            }
            const auto kids = split_box(r.box, opt.split_arity, opt.g_split);
            if (kids.empty()) {
                r.status = BoxStatus::Failed;
                record(r);
                fail_with(r);
                continue;
            }
            r.status = BoxStatus::Split;
            record(r);
            for (const auto& k : kids) children.push_back({k, r.depth + 1});
        }
        // Boxes left unexamined when the budget runs out make the certificate fail;
        // the witness is the deepest examined box that still exceeds the goal.
        if (take < level.size() || (cert.examined >= opt.max_boxes && !children.empty())) {
            failed = true;
            if (last_split) fail_with(*last_split);
        }
        level.swap(children);
    }
    cert.certified = !failed;
    cert.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
}

}  // namespace kmr
