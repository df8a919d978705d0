#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sentistack {

/// Deterministic RNG wrapper. std::mt19937_64 output is pinned by the
/// standard, and all derived draws below use fixed algorithms, so sequences
/// are reproducible across platforms and compilers. Never use
/// std::uniform_*_distribution or std::shuffle here: their mappings are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (both values used, cached).
    double normal();

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Fisher-Yates using below(); deterministic for a given seed.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64-style combiner for deriving stream seeds from (seed, tag) pairs.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sentistack
