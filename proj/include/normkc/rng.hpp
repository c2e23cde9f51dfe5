#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "normkc/errors.hpp"

namespace normkc {

// Counter-based generator: every draw is a hash of (seed, stream, counter),
// so restarts with distinct seeds and distinct streams within one run are
// independent and fully reproducible across platforms and thread schedules.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    SplitRng stream(std::uint64_t s) const { return SplitRng(seed_, s); }

    std::uint64_t next_u64() {
        return mix(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1) + counter_++);
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo,hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform in {0,...,n-1} without modulo bias.
    std::size_t next_index(std::size_t n) {
        if (n == 0)
            throw input_error("rng: empty range");
        const std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t v = next_u64();
        while (v >= bound)
            v = next_u64();
        return static_cast<std::size_t>(v % n);
    }

    // Index i with probability weights[i] / sum(weights). Weights must be
    // nonnegative with a positive sum.
    std::size_t sample_discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights)
            total += w;
        if (!(total > 0.0))
            throw input_error("rng: discrete sample over zero-mass weights");
        const double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc)
                return i;
        }
        // Round-off can push u past the accumulated sum; return the last
        // positive-weight index.
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0)
                return i;
        return weights.size() - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t a) {
        a ^= a >> 33;
        a *= 0xff51afd7ed558ccdULL;
        a ^= a >> 33;
        a *= 0xc4ceb9fe1a85ec53ULL;
        a ^= a >> 33;
        return a;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace normkc
