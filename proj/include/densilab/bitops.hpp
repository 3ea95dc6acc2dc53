#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>

#include "densilab/topology.hpp"

namespace densilab {

// Copies `len` bits from src starting at bit spos to dst starting at bit
// dpos. The source bits must lie inside the source array; dst is
// read-modify-written, so untouched bits survive.
inline void copy_bits(uint64_t* dst, int64_t dpos, const uint64_t* src,
                      int64_t spos, int64_t len) {
    while (len > 0) {
        const int doff = int(dpos & 63);
        const int chunk = int(std::min<int64_t>(len, 64 - doff));
        const int64_t sw = spos >> 6;
        const int soff = int(spos & 63);
        uint64_t bits = src[sw] >> soff;
        if (((spos + chunk - 1) >> 6) != sw) bits |= src[sw + 1] << (64 - soff);
        const uint64_t m = chunk == 64 ? ~uint64_t(0) : ((uint64_t(1) << chunk) - 1);
        bits &= m;
        dst[dpos >> 6] = (dst[dpos >> 6] & ~(m << doff)) | (bits << doff);
        spos += chunk;
        dpos += chunk;
        len -= chunk;
    }
}

// dst[k] = src[(k + shift) mod n] for k in [0, n); padding bits of dst are
// cleared. src and dst hold ceil(n/64) words and must not alias.
inline void rotate_bits(uint64_t* dst, const uint64_t* src, int64_t n,
                        int64_t shift) {
    const int64_t words = (n + 63) / 64;
    std::fill(dst, dst + words, 0);
    const int64_t s = floored_mod(shift, n);
    if (s == 0) {
        std::copy(src, src + words, dst);
        return;
    }
    copy_bits(dst, 0, src, s, n - s);
    copy_bits(dst, n - s, src, 0, s);
}

inline int64_t popcount_words(const uint64_t* w, int64_t count) {
    int64_t total = 0;
    for (int64_t k = 0; k < count; ++k) total += std::popcount(w[k]);
    return total;
}

} // namespace densilab
