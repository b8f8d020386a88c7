#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "kmr/bipoint.hpp"

namespace kmr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Nearest facility of `set` to point index `u`; lowest facility id on ties.
std::pair<int, double> nearest(const Instance& inst, const std::vector<int>& set, int u) {
    int best = -1;
    double bd = kInf;
    for (int i : set) {
        const double d = inst.dist(i, u);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return {best, bd};
}

}  // namespace

int StarDecomposition::n_l2() const {
    int n = 0;
    for (int s : t2) n += static_cast<int>(stars[s].size());
    return n;
}

std::vector<int> StarDecomposition::l2_leaves() const {
    std::vector<int> out;
    for (int s : t2) out.insert(out.end(), stars[s].leaves.begin(), stars[s].leaves.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<StarDecomposition> decompose_stars(const Instance& inst, const BiPointSolution& bp) {
    if (auto errs = check_bipoint(inst, bp); !errs.empty()) throw std::invalid_argument("invalid bi-point: " + errs.front());
    StarDecomposition dec;
    dec.k = inst.k;
    dec.a = bp.a;
    dec.b = bp.b;
    dec.f1 = sorted_unique(bp.f1);
    dec.f2 = sorted_unique(bp.f2);
    dec.d1 = connection_cost(inst, dec.f1);
    dec.d2 = connection_cost(inst, dec.f2);
    dec.delta_f = static_cast<int>(dec.f2.size()) - static_cast<int>(dec.f1.size());
    if (dec.delta_f <= 0) return std::nullopt;

    const int nf = inst.nf();
    dec.star_of_facility.assign(nf, -1);
    dec.center_star.assign(nf, -1);
    dec.stars.resize(dec.f1.size());
    for (std::size_t s = 0; s < dec.f1.size(); ++s) {
        dec.stars[s].center = dec.f1[s];
        dec.center_star[dec.f1[s]] = static_cast<int>(s);
    }
    for (int leaf : dec.f2) {
        const int c = nearest(inst, dec.f1, leaf).first;
        const int s = dec.center_star[c];
        dec.stars[s].leaves.push_back(leaf);
        dec.star_of_facility[leaf] = s;
    }

    dec.kind.resize(dec.stars.size());
    for (std::size_t s = 0; s < dec.stars.size(); ++s) {
        const std::size_t n = dec.stars[s].size();
        const int si = static_cast<int>(s);
        if (n == 0) {
            dec.kind[s] = StarKind::C0;
            dec.t0.push_back(si);
        } else if (n == 1) {
            dec.kind[s] = StarKind::T1B;
            dec.t1.push_back(si);
        } else {
            dec.kind[s] = StarKind::T2;
            dec.t2.push_back(si);
        }
    }

    // g_i = d(i, i') / min over L2 of d(i, l); 0/0 counts as 0 and x/0 as infinity.
    const std::vector<int> l2 = dec.l2_leaves();
    dec.g_star.assign(dec.stars.size(), std::numeric_limits<double>::quiet_NaN());
    for (int s : dec.t1) {
        const int c = dec.stars[s].center;
        const double num = inst.ff(c, dec.stars[s].leaves.front());
        const double den = l2.empty() ? kInf : nearest(inst, l2, c).second;
        if (den == 0.0) dec.g_star[s] = num == 0.0 ? 0.0 : kInf;
        else dec.g_star[s] = num / den;
    }
    std::vector<int> order = dec.t1;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return dec.g_star[x] > dec.g_star[y]; });
    const std::size_t n1a =
        std::min(order.size(), static_cast<std::size_t>(std::max(0.0, std::ceil(dec.a * dec.delta_f - 1e-9))));
    dec.t1a.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n1a));
    dec.t1b.assign(order.begin() + static_cast<std::ptrdiff_t>(n1a), order.end());
    for (int s : dec.t1a) dec.kind[s] = StarKind::T1A;
    dec.g = kInf;
    for (int s : dec.t1a) dec.g = std::min(dec.g, dec.g_star[s]);

    const double df = dec.delta_f;
    if (dec.d1 > 0) dec.r_d = dec.d2 / dec.d1;
    else dec.r_d = dec.d2 > 0 ? kInf : 1.0;
    dec.r0 = dec.n_c0() / df;
    dec.r1 = dec.n_c1() / df;
    dec.r2 = dec.n_c2() / df;
    dec.s0 = 1.0 / (1.0 + dec.r0);
    return dec;
}

std::string ClientGeometry::class_name() const { return ClientClass{sign, x, y}.name(); }

ClientGeometry classify_client(const Instance& inst, const StarDecomposition& dec, int client) {
    if (client < 0 || client >= inst.nc()) throw std::out_of_range("client index out of range");
    ClientGeometry j;
    j.client = client;
    const int u = inst.nf() + client;
    std::tie(j.i1, j.d1) = nearest(inst, dec.f1, u);
    std::tie(j.i2, j.d2) = nearest(inst, dec.f2, u);
    const int s1 = dec.center_star[j.i1];
    const int s2 = dec.star_of_facility[j.i2];
    j.i3 = dec.stars[s2].center;
    j.x = dec.kind[s1];
    j.y = dec.kind[s2];

    j.sign = j.d2 <= j.d1 ? Sign::P : Sign::N;
    if (j.x == StarKind::T1B && j.y == StarKind::T2 && dec.g * (j.d1 + j.d2) < 2.0 * j.d2)
        j.sign = j.sign == Sign::P ? Sign::Pp : Sign::Np;

    if (dec.stars[s1].size() == 1) j.i0 = dec.stars[s1].leaves.front();
    const std::vector<int> l2 = dec.l2_leaves();
    if (!l2.empty()) {
        j.i4 = nearest(inst, l2, j.i3).first;
        j.i5 = dec.stars[dec.star_of_facility[*j.i4]].center;
    }
    return j;
}

double CostBounds::best() const {
    double v = kInf;
    for (const auto& c : {c213, c123, c210, c120, c145})
        if (c) v = std::min(v, *c);
    return v;
}

CostBounds cost_bound(const ClientGeometry& j, const RoundingParams& params, double g) {
    if (j.i1 < 0 || j.i2 < 0) throw std::invalid_argument("client geometry is incomplete");
    const double px = params.p(j.x), qy = params.q(j.y), eta = params.eta;
    const double d1 = j.d1, d2 = j.d2;
    const double pr1 = 1.0 - px;
    const double pr2 = (1.0 + eta) * (1.0 - qy);
    const double pr12 = (1.0 + eta) * (1.0 - px) * (1.0 - qy);

    CostBounds out;
    if (params.p(j.y) + qy >= 1.0 - 1e-12) {
        out.c213 = d2 + pr2 * (d1 - d2) + 2.0 * pr12 * d2;
        out.c123 = d1 + pr1 * (d2 - d1) + pr12 * (d1 + d2);
    } else if (j.y == StarKind::T1A) {
        if (!j.i4) throw std::invalid_argument("class needs the auxiliary facility i4");
        const double pr14 = (1.0 + eta) * (1.0 - px) * (1.0 - params.q2);
        out.c145 = d1 + pr1 * (2.0 * d2 + (d1 + d2) / g) + pr14 * (d1 + d2) / g;
    }
    if (j.x == StarKind::T1B && j.y == StarKind::T2) {
        out.c210 = d2 + pr2 * (d1 - d2) + pr12 * g * (d1 + d2);
        out.c120 = d1 + pr1 * (d2 - d1) + pr12 * (d1 - d2 + g * (d1 + d2));
    }
    return out;
}

}  // namespace kmr
