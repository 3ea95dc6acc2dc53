#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Deterministic random streams. Everything here is fixed-algorithm and
// platform-independent: the same seed produces the same draws on every
// build, which the reproducibility contract of the reports relies on.

namespace densilab {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives the seed for replica `index` of a run with the given master seed.
// splitmix64 is a bijection of the counter, so distinct (master, index)
// pairs map to distinct states before mixing.
inline uint64_t derive_stream_seed(uint64_t master_seed, uint64_t index) {
    uint64_t s = master_seed;
    uint64_t a = splitmix64(s);
    s = a + 0x9E3779B97F4A7C15ULL * (index + 1);
    return splitmix64(s);
}

// xoshiro256** by Blackman & Vigna (public domain reference implementation).
class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) without modulo bias (Lemire).
    uint64_t bounded(uint64_t bound) {
        __uint128_t m = __uint128_t(next_u64()) * bound;
        auto lo = uint64_t(m);
        if (lo < bound) {
            const uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = __uint128_t(next_u64()) * bound;
                lo = uint64_t(m);
            }
        }
        return uint64_t(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential() {
        // 1 - uniform() is in (0,1], so the log is finite.
        return -std::log(1.0 - uniform());
    }

    // Exact Poisson sample via unit-rate arrival counting. Cost is O(lambda),
    // fine for the event counts used here (<= a few thousand per call).
    int64_t poisson(double lambda) {
        int64_t k = 0;
        double acc = exponential();
        while (acc <= lambda) {
            ++k;
            acc += exponential();
        }
        return k;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t state_[4];
};

// Coin stream for PCA/IPS updates: one uniform draw per update, consumed in a
// fixed order. Draws have 32-bit resolution; value() and the threshold form
// compare identically, so packed kernels and the scalar path agree bit for bit.
class Coin {
public:
    explicit Coin(uint64_t seed) : rng_(seed) {}

    uint32_t next_u32() {
        if (have_half_) {
            have_half_ = false;
            return uint32_t(buffer_);
        }
        buffer_ = rng_.next_u64();
        have_half_ = true;
        return uint32_t(buffer_ >> 32);
    }

    double next() { return double(next_u32()) * 0x1.0p-32; }

    // u32 threshold such that (draw_u32 < threshold) == (draw_double < p).
    static uint32_t threshold(double p) {
        if (p <= 0.0) return 0;
        if (p >= 1.0) return std::numeric_limits<uint32_t>::max();
        double t = std::ceil(p * 0x1.0p32);
        if (t >= 0x1.0p32) return std::numeric_limits<uint32_t>::max();
        return uint32_t(t);
    }

private:
    Rng rng_;
    uint64_t buffer_ = 0;
    bool have_half_ = false;
};

} // namespace densilab
