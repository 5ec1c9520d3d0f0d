#pragma once

#include <cstdint>

namespace otlab {

// Counter-based generator (splitmix64 over a seed/counter pair).  Every draw
// is a pure function of (seed, counter), so streams are reproducible across
// platforms and safe to fork by offsetting the counter.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (++counter_);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // derive an independent stream, e.g. one per trial
    Rng fork(std::uint64_t stream) const {
        return Rng(seed_ ^ (0x6a09e667f3bcc909ULL * (stream + 1)), 0);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace otlab
