#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "densilab/bitops.hpp"
#include "densilab/rng.hpp"
#include "densilab/topology.hpp"

// Bit-packed configurations over a topology. One bit per cell, laid out by
// Topology::slot; padding bits are kept zero as a class invariant so word
// popcounts and word-parallel kernels need no per-bit cleanup.

namespace densilab {

class Configuration {
public:
    explicit Configuration(TopologyPtr topo)
        : topo_(std::move(topo)), words_(size_t(topo_->padded_words()), 0) {}

    const TopologyPtr& topology() const { return topo_; }

    int get(int64_t id) const {
        const int64_t s = topo_->slot(id);
        return int((words_[size_t(s >> 6)] >> (s & 63)) & 1);
    }

    void set(int64_t id, int v) {
        const int64_t s = topo_->slot(id);
        const uint64_t bit = uint64_t(1) << (s & 63);
        if (v)
            words_[size_t(s >> 6)] |= bit;
        else
            words_[size_t(s >> 6)] &= ~bit;
    }

    uint64_t* words() { return words_.data(); }
    const uint64_t* words() const { return words_.data(); }
    int64_t word_count() const { return int64_t(words_.size()); }

    // Ones among interior cells.
    int64_t interior_ones() const {
        int64_t total = 0;
        for (size_t k = 0; k < words_.size(); ++k)
            total += std::popcount(words_[k] & topo_->interior_mask(int64_t(k)));
        return total;
    }

    double density() const {
        return double(interior_ones()) / double(topo_->cell_count());
    }

    // True when every interior cell holds the same value; that value is
    // written to *value when non-null.
    bool is_uniform(int* value = nullptr) const {
        bool all0 = true, all1 = true;
        for (size_t k = 0; k < words_.size() && (all0 || all1); ++k) {
            const uint64_t m = topo_->interior_mask(int64_t(k));
            const uint64_t w = words_[k] & m;
            if (w != 0) all0 = false;
            if (w != m) all1 = false;
        }
        if (all0 || all1) {
            if (value) *value = all0 ? 0 : 1;
            return true;
        }
        return false;
    }

    // Sets every cell, halo included.
    void fill(int v) {
        if (v)
            for (size_t k = 0; k < words_.size(); ++k)
                words_[k] = topo_->word_mask(int64_t(k));
        else
            std::fill(words_.begin(), words_.end(), 0);
    }

    // Restores the padding invariant after word-parallel writes.
    void mask_padding() {
        for (size_t k = 0; k < words_.size(); ++k)
            words_[k] &= topo_->word_mask(int64_t(k));
    }

    bool operator==(const Configuration& o) const {
        return topo_ == o.topo_ && words_ == o.words_;
    }

private:
    TopologyPtr topo_;
    std::vector<uint64_t> words_;
};

// Independent Bernoulli(p) values on the interior, one draw per cell in id
// order, so a given seed yields the same configuration everywhere.
inline void sample_bernoulli(Configuration& cfg, double p, Rng& rng) {
    const auto& topo = *cfg.topology();
    for (int64_t id = 0; id < topo.cell_count(); ++id)
        cfg.set(id, rng.uniform() < p ? 1 : 0);
}

// Exactly k ones placed uniformly at random on the interior.
inline void sample_fixed_ones(Configuration& cfg, int64_t k, Rng& rng) {
    const auto& topo = *cfg.topology();
    const int64_t n = topo.cell_count();
    if (k < 0 || k > n)
        throw std::invalid_argument("sample_fixed_ones: k out of range");
    auto ids = std::vector<int64_t>(size_t(n));
    std::iota(ids.begin(), ids.end(), 0);
    for (int64_t t = 0; t < k; ++t)
        std::swap(ids[size_t(t)], ids[size_t(t + int64_t(rng.bounded(uint64_t(n - t))))]);
    for (int64_t id = 0; id < n; ++id) cfg.set(id, 0);
    for (int64_t t = 0; t < k; ++t) cfg.set(ids[size_t(t)], 1);
}

// Halo initialization for truncated trees.
inline void set_halo(Configuration& cfg, int v) {
    const auto& topo = *cfg.topology();
    for (int64_t id = topo.cell_count(); id < topo.storage_count(); ++id)
        cfg.set(id, v);
}

inline void sample_halo_bernoulli(Configuration& cfg, double p, Rng& rng) {
    const auto& topo = *cfg.topology();
    for (int64_t id = topo.cell_count(); id < topo.storage_count(); ++id)
        cfg.set(id, rng.uniform() < p ? 1 : 0);
}

// Cyclic occurrences of a 0/1 pattern on a ring: positions k such that
// x_{k+t} = pattern[t] for all t.
inline int64_t count_pattern(const Configuration& cfg, const std::string& pattern) {
    const auto& topo = *cfg.topology();
    if (topo.kind() != TopologyKind::ring)
        throw std::invalid_argument("count_pattern: ring topology required");
    const int64_t n = topo.cell_count();
    if (pattern.empty() || int64_t(pattern.size()) > n)
        throw std::invalid_argument("count_pattern: bad pattern length");
    const int64_t words = topo.padded_words();
    std::vector<uint64_t> acc(topo.word_masks().begin(), topo.word_masks().end());
    auto plane = std::vector<uint64_t>(size_t(words));
    for (size_t t = 0; t < pattern.size(); ++t) {
        if (pattern[t] != '0' && pattern[t] != '1')
            throw std::invalid_argument("count_pattern: pattern must be 0/1");
        rotate_bits(plane.data(), cfg.words(), n, int64_t(t));
        for (int64_t k = 0; k < words; ++k)
            acc[size_t(k)] &= pattern[t] == '1' ? plane[size_t(k)] : ~plane[size_t(k)];
    }
    return popcount_words(acc.data(), words);
}

inline std::string to_ascii(const Configuration& cfg) {
    const auto& topo = *cfg.topology();
    std::string out;
    out.reserve(size_t(topo.storage_count()));
    for (int64_t id = 0; id < topo.storage_count(); ++id)
        out.push_back(cfg.get(id) ? '1' : '0');
    return out;
}

inline Configuration from_ascii(TopologyPtr topo, const std::string& bits) {
    if (int64_t(bits.size()) != topo->storage_count())
        throw std::invalid_argument("from_ascii: length mismatch");
    Configuration cfg(std::move(topo));
    for (size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] != '0' && bits[k] != '1')
            throw std::invalid_argument("from_ascii: characters must be 0/1");
        cfg.set(int64_t(k), bits[k] == '1');
    }
    return cfg;
}

} // namespace densilab
