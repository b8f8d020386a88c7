#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kmr/bipoint.hpp"

namespace kmr {

RegimeInstance synth_regime_instance(std::uint64_t seed) {
    Rng rng(seed);
    RegimeInstance out;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        // Star sizes: a few small 2-stars, sometimes one very large star, a few empty stars.
        std::vector<int> two;
        const int m2 = 3 + static_cast<int>(rng.below(6));
        for (int i = 0; i < m2; ++i) two.push_back(2 + static_cast<int>(rng.below(3)));
        if (rng.bernoulli(0.3)) two.push_back(100);
        int l2 = 0;
        for (int s : two) l2 += s;
        const int n0 = static_cast<int>(rng.below(4));
        const int delta_f = l2 - static_cast<int>(two.size()) - n0;
        if (delta_f <= 0) {
            ++out.rejected;
            continue;
        }
        const int n1 = delta_f + 1 + static_cast<int>(rng.below(4));

        // Leaves per star: 0-stars first, then 1-stars, then 2-stars.
        std::vector<int> sizes(n0, 0);
        sizes.insert(sizes.end(), n1, 1);
        sizes.insert(sizes.end(), two.begin(), two.end());

        // Centers on a grid of spacing 10; leaves at radius 0.5-1.5 around them; clients
        // on the segment from each leaf toward its center.
        const int n_stars = static_cast<int>(sizes.size());
        const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_stars))));
        std::vector<Point> centers, leaves, clients;
        for (int s = 0; s < n_stars; ++s) {
            const Point c{10.0 * (s % cols), 10.0 * (s / cols)};
            centers.push_back(c);
            for (int l = 0; l < sizes[s]; ++l) {
                const double ang = 2.0 * std::numbers::pi * rng.uniform();
                const double rad = 0.5 + rng.uniform();
                const Point leaf{c.x + rad * std::cos(ang), c.y + rad * std::sin(ang)};
                leaves.push_back(leaf);
                const int nj = 1 + static_cast<int>(rng.below(3));
                for (int j = 0; j < nj; ++j) {
                    const double t = 0.33 + 0.06 * rng.uniform();
                    clients.push_back({leaf.x + t * (c.x - leaf.x), leaf.y + t * (c.y - leaf.y)});
                }
            }
        }
        const int nf1 = static_cast<int>(centers.size());
        const double b_target = 0.55 + 0.17 * rng.uniform();
        const int k = nf1 + static_cast<int>(std::lround(b_target * delta_f));

        std::vector<Point> facilities = centers;
        facilities.insert(facilities.end(), leaves.begin(), leaves.end());
        Instance inst = Instance::euclidean(facilities, clients, k);
        BiPointSolution bp;
        for (int i = 0; i < nf1; ++i) bp.f1.push_back(i);
        for (int i = nf1; i < inst.nf(); ++i) bp.f2.push_back(i);
        bp.b = static_cast<double>(k - nf1) / delta_f;
        bp.a = 1.0 - bp.b;
        bp.d1 = connection_cost(inst, bp.f1);
        bp.d2 = connection_cost(inst, bp.f2);

        const auto dec = decompose_stars(inst, bp);
        if (!dec || classify_regime(&*dec) != Regime::Main) {
            ++out.rejected;
            continue;
        }
        out.inst = std::move(inst);
        out.bp = std::move(bp);
        return out;
    }
    throw std::runtime_error("regime synthesizer did not converge");
}

}  // namespace kmr
