#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "matcrs/rational.hpp"
#include "matcrs/subset.hpp"

namespace matcrs {

/// Counter-based pseudorandom generator: output t is a hash of (key, t).
/// Streams split off a parent are statistically independent, and a draw
/// depends only on (seed, counter), never on call history elsewhere.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    static CounterRng seeded(std::uint64_t seed) { return CounterRng(mix(seed ^ kGamma)); }

    /// Independent child stream; disjoint from this one for any stream id.
    CounterRng split(std::uint64_t stream) const {
        return CounterRng(mix(key_ + kGamma * (stream + 1)));
    }

    std::uint64_t next() { return mix(key_ + kGamma * ++counter_); }

    /// Uniform draw in [0, bound), bias-free via rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("below(0)");
        std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
        while (true) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Exact Bernoulli(p) for rational p in [0,1] with denominator < 2^63.
    bool bernoulli(const Rat& p) {
        if (p < 0 || p > 1) throw std::invalid_argument("bernoulli needs p in [0,1]");
        Int num = numerator(p), den = denominator(p);
        if (den >= Int(1) << 63) throw std::invalid_argument("bernoulli denominator too large");
        return below(den.convert_to<std::uint64_t>()) < num.convert_to<std::uint64_t>();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    std::vector<int> permutation(int n) {
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        shuffle(order);
        return order;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ull;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Exact categorical draw: picks index i with the given rational weights
/// (assumed nonnegative, summing to 1) by refining a lazy binary fraction
/// until it lands strictly inside one cumulative segment.
inline std::size_t sample_index(const std::vector<Rat>& probs, CounterRng& rng) {
    Rat low = 0;        // left end of the refined interval
    Rat width = 1;
    while (true) {
        Rat cum = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            Rat next = cum + probs[i];
            if (low >= cum && low + width <= next) return i;
            cum = next;
        }
        // Interval straddles a boundary: halve it with one fresh bit.
        width /= 2;
        if (rng.next() & 1u) low += width;
    }
}

}  // namespace matcrs
