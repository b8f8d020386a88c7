#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace kmr {

// 64-bit generator used by every randomized routine. Parallel or per-algorithm
// streams are derived with Rng::stream(seed, index), which hashes the pair
// through splitmix64 so that streams for distinct indices are decorrelated.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ mix(index + 0x9E3779B97F4A7C15ULL));
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // Uniform double in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_));
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    // Uniformly random subset of `pool` with `count` elements (clamped to the pool size).
    template <class T>
    std::vector<T> sample(std::vector<T> pool, std::size_t count) {
        count = std::min(count, pool.size());
        for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + below(pool.size() - i)]);
        pool.resize(count);
        return pool;
    }

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace kmr
