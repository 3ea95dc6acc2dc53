#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "densilab/config.hpp"
#include "densilab/rng.hpp"
#include "densilab/rules.hpp"

// Structural analysis of the two-dimensional dynamics and the
// one-dimensional particle picture.
//
// Two-dimensional checks run on bounded windows with an implicit all-ones
// exterior, so every 0-cluster is finite and cluster bookkeeping needs no
// wrap-around cases. Connectivity is that of the triangular lattice: the
// four axis neighbors plus the two anti-diagonal ones, (i+1,j-1) and
// (i-1,j+1), matching the bonds the North-East-Centre majority interacts
// with.

namespace densilab {

struct Cell2 {
    int64_t i = 0;
    int64_t j = 0;
    bool operator==(const Cell2&) const = default;
};

// Lexicographic on (i, j): rightmost column first, then upmost row.
inline bool cell2_less(const Cell2& a, const Cell2& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
}

inline constexpr Cell2 no_cell{std::numeric_limits<int64_t>::min(),
                               std::numeric_limits<int64_t>::min()};

class Grid {
public:
    Grid(int64_t w, int64_t h, uint8_t fill = 1)
        : w_(w), h_(h), cells_(size_t(w * h), fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("grid: bad shape");
    }

    int64_t width() const { return w_; }
    int64_t height() const { return h_; }

    bool inside(int64_t i, int64_t j) const {
        return i >= 0 && i < w_ && j >= 0 && j < h_;
    }

    // Reads outside the window see the all-ones exterior.
    int at(int64_t i, int64_t j) const {
        return inside(i, j) ? cells_[size_t(j * w_ + i)] : 1;
    }

    void set(int64_t i, int64_t j, int v) {
        cells_[size_t(j * w_ + i)] = uint8_t(v);
    }

    int64_t zero_count() const {
        int64_t z = 0;
        for (uint8_t c : cells_) z += c == 0;
        return z;
    }

    bool operator==(const Grid&) const = default;

private:
    int64_t w_, h_;
    std::vector<uint8_t> cells_;
};

// Offsets of the six triangular-lattice neighbors.
inline constexpr Cell2 tri_neighbors[6] = {{1, 0},  {-1, 0}, {0, 1},
                                           {0, -1}, {1, -1}, {-1, 1}};

// One synchronous North-East-Centre majority step on the window.
inline Grid toom_window_step(const Grid& g) {
    Grid out(g.width(), g.height());
    for (int64_t j = 0; j < g.height(); ++j)
        for (int64_t i = 0; i < g.width(); ++i)
            out.set(i, j, maj3v(g.at(i, j), g.at(i, j + 1), g.at(i + 1, j)));
    return out;
}

// Evaluates the guarded-majority update of a single cell against the
// window, exterior ones included.
inline int toom_ips_eval_at(const Grid& g, int64_t i, int64_t j) {
    Rule r;
    r.id = RuleId::toom_ips;
    uint32_t bits = 0;
    bits |= uint32_t(g.at(i, j)) << 0;
    bits |= uint32_t(g.at(i, j + 1)) << 1;
    bits |= uint32_t(g.at(i + 1, j)) << 2;
    bits |= uint32_t(g.at(i, j - 1)) << 3;
    bits |= uint32_t(g.at(i - 1, j)) << 4;
    bits |= uint32_t(g.at(i + 1, j - 1)) << 5;
    bits |= uint32_t(g.at(i - 1, j + 1)) << 6;
    return eval_rule(r, bits);
}

// Maximal connected sets of zero cells under triangular adjacency.
inline std::vector<std::vector<Cell2>> zero_clusters(const Grid& g) {
    std::vector<std::vector<Cell2>> clusters;
    std::vector<uint8_t> seen(size_t(g.width() * g.height()), 0);
    const auto idx = [&](int64_t i, int64_t j) {
        return size_t(j * g.width() + i);
    };
    for (int64_t j = 0; j < g.height(); ++j)
        for (int64_t i = 0; i < g.width(); ++i) {
            if (g.at(i, j) != 0 || seen[idx(i, j)]) continue;
            std::vector<Cell2> cluster;
            std::vector<Cell2> stack = {{i, j}};
            seen[idx(i, j)] = 1;
            while (!stack.empty()) {
                const Cell2 c = stack.back();
                stack.pop_back();
                cluster.push_back(c);
                for (const Cell2& d : tri_neighbors) {
                    const int64_t ni = c.i + d.i, nj = c.j + d.j;
                    if (!g.inside(ni, nj) || g.at(ni, nj) != 0 ||
                        seen[idx(ni, nj)])
                        continue;
                    seen[idx(ni, nj)] = 1;
                    stack.push_back({ni, nj});
                }
            }
            clusters.push_back(std::move(cluster));
        }
    return clusters;
}

struct Rect {
    int64_t imin = 0, imax = -1, jmin = 0, jmax = -1;
    bool contains(const Cell2& c) const {
        return c.i >= imin && c.i <= imax && c.j >= jmin && c.j <= jmax;
    }
};

inline Rect bounding_rect(const std::vector<Cell2>& cluster) {
    if (cluster.empty()) throw std::invalid_argument("bounding_rect: empty");
    Rect r{cluster[0].i, cluster[0].i, cluster[0].j, cluster[0].j};
    for (const Cell2& c : cluster) {
        r.imin = std::min(r.imin, c.i);
        r.imax = std::max(r.imax, c.i);
        r.jmin = std::min(r.jmin, c.j);
        r.jmax = std::max(r.jmax, c.j);
    }
    return r;
}

// The upmost among the rightmost cells, the quantity whose monotone decrease
// drives the cluster-erosion argument. Empty input maps to the sentinel.
inline Cell2 v_point(const std::vector<Cell2>& cluster) {
    Cell2 best = no_cell;
    for (const Cell2& c : cluster)
        if (best == no_cell || cell2_less(best, c)) best = c;
    return best;
}

// Checks that one synchronous step neither merges nor splits 0-clusters:
// the 0-components of the stepped grid must be exactly the nonempty images
// of the original clusters stepped in isolation. The step function is a
// parameter so the check itself can be exercised against rules that do
// merge or split.
inline bool check_no_merge_split(
    const Grid& g, std::string* why = nullptr,
    const std::function<Grid(const Grid&)>& step = toom_window_step) {
    const auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    const Grid full = step(g);
    const auto full_clusters = zero_clusters(full);
    std::vector<int64_t> label(size_t(g.width() * g.height()), -1);
    for (size_t f = 0; f < full_clusters.size(); ++f)
        for (const Cell2& c : full_clusters[f])
            label[size_t(c.j * g.width() + c.i)] = int64_t(f);
    std::vector<int64_t> claimed_by(full_clusters.size(), -1);
    std::vector<int64_t> claimed_size(full_clusters.size(), 0);
    const auto clusters = zero_clusters(g);
    for (size_t k = 0; k < clusters.size(); ++k) {
        Grid alone(g.width(), g.height());
        for (const Cell2& c : clusters[k]) alone.set(c.i, c.j, 0);
        const Grid img = step(alone);
        int64_t target = -1, img_size = 0;
        for (int64_t j = 0; j < g.height(); ++j)
            for (int64_t i = 0; i < g.width(); ++i) {
                if (img.at(i, j) != 0) continue;
                ++img_size;
                const int64_t f = full.at(i, j) == 0
                                      ? label[size_t(j * g.width() + i)]
                                      : -1;
                if (f < 0)
                    return fail("image zero at (" + std::to_string(i) + "," +
                                std::to_string(j) +
                                ") is absent from the full step");
                if (target == -1) target = f;
                if (f != target)
                    return fail("cluster " + std::to_string(k) +
                                " split across several components");
            }
        if (img_size == 0) continue;
        if (claimed_by[size_t(target)] != -1)
            return fail("clusters " +
                        std::to_string(claimed_by[size_t(target)]) + " and " +
                        std::to_string(k) + " merged into one component");
        claimed_by[size_t(target)] = int64_t(k);
        claimed_size[size_t(target)] = img_size;
    }
    for (size_t f = 0; f < full_clusters.size(); ++f) {
        if (claimed_by[f] == -1)
            return fail("component " + std::to_string(f) +
                        " of the full step has no source cluster");
        if (claimed_size[f] != int64_t(full_clusters[f].size()))
            return fail("image of cluster " +
                        std::to_string(claimed_by[f]) +
                        " covers its component only partially");
    }
    return true;
}

// Erodes a w-by-h all-zero rectangle planted in a window with a one-cell
// border; returns the number of steps until no zeros remain. When
// `contained` is given it reports whether the zero set stayed inside the
// original rectangle throughout.
inline int64_t erosion_steps(int64_t w, int64_t h, int64_t budget,
                             bool* contained = nullptr) {
    Grid g(w + 2, h + 2);
    for (int64_t j = 1; j <= h; ++j)
        for (int64_t i = 1; i <= w; ++i) g.set(i, j, 0);
    const Rect rect{1, w, 1, h};
    bool inside = true;
    for (int64_t t = 0; t <= budget; ++t) {
        const auto clusters = zero_clusters(g);
        for (const auto& cl : clusters)
            for (const Cell2& c : cl)
                if (!rect.contains(c)) inside = false;
        if (g.zero_count() == 0) {
            if (contained) *contained = inside;
            return t;
        }
        g = toom_window_step(g);
    }
    if (contained) *contained = inside;
    return -1;
}

// Particle recoding of a ring configuration: psi_i = 1 - x_i - x_{i-1}.
// A +1 marks a 00 pattern ending at i, a -1 marks a 11 pattern.
inline std::vector<int8_t> recode_psi(const Configuration& cfg) {
    const auto& topo = *cfg.topology();
    if (topo.kind() != TopologyKind::ring)
        throw std::invalid_argument("recode_psi: ring topology required");
    const int64_t n = topo.cell_count();
    auto psi = std::vector<int8_t>(size_t(n));
    for (int64_t k = 0; k < n; ++k)
        psi[size_t(k)] =
            int8_t(1 - cfg.get(k) - cfg.get(floored_mod(k - 1, n)));
    return psi;
}

// One step of ballistic annihilation on a ring: positive particles move one
// cell right, negative ones one cell left; particles that meet on a cell or
// cross on an edge annihilate pairwise.
inline std::vector<int8_t> annihilation_step(const std::vector<int8_t>& psi) {
    const int64_t n = int64_t(psi.size());
    if (n < 2) throw std::invalid_argument("annihilation_step: ring too short");
    std::vector<int8_t> alive = psi;
    for (int64_t k = 0; k < n; ++k) {
        const int64_t r = floored_mod(k + 1, n);
        if (psi[size_t(k)] == 1 && psi[size_t(r)] == -1) {
            alive[size_t(k)] = 0; // crossing pair cancels on the edge
            alive[size_t(r)] = 0;
        }
    }
    std::vector<int8_t> out(size_t(n), 0);
    for (int64_t k = 0; k < n; ++k) {
        if (alive[size_t(k)] == 1)
            out[size_t(floored_mod(k + 1, n))] += 1;
        else if (alive[size_t(k)] == -1)
            out[size_t(floored_mod(k - 1, n))] -= 1;
    }
    return out;
}

// Probability that the majority of three independent Bernoulli(p) values is
// one.
inline double h_fun(double p) { return 3.0 * p * p - 2.0 * p * p * p; }

inline double h_iterate(double p, int n) {
    double v = p;
    for (int k = 0; k < n; ++k) v = h_fun(v);
    return v;
}

// Law of the root of the depth-n ternary majority evaluation: exact value is
// the n-th iterate of h. The sampler folds 3^n independent leaves, serving
// as an independent check of the iteration and of tree simulations.
inline double tree_root_law_mc(int n, double p, int64_t samples, Rng& rng) {
    if (n < 0 || n > 12)
        throw std::invalid_argument("tree_root_law_mc: depth out of range");
    int64_t leaves = 1;
    for (int k = 0; k < n; ++k) leaves *= 3;
    auto vals = std::vector<uint8_t>(size_t(leaves));
    int64_t ones = 0;
    for (int64_t s = 0; s < samples; ++s) {
        for (auto& v : vals) v = rng.uniform() < p ? 1 : 0;
        int64_t width = leaves;
        while (width > 1) {
            width /= 3;
            for (int64_t k = 0; k < width; ++k)
                vals[size_t(k)] = uint8_t(maj3v(vals[size_t(3 * k)],
                                                vals[size_t(3 * k + 1)],
                                                vals[size_t(3 * k + 2)]));
        }
        ones += vals[0];
    }
    return double(ones) / double(samples);
}

} // namespace densilab
