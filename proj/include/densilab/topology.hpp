#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Finite site spaces the dynamics run on: rings Z_n, two-dimensional tori,
// depth-truncated regular trees (Cayley graphs of free products of
// involutions and of free groups), and product lifts that stack independent
// layers of a base space.
//
// Coordinate convention, fixed project-wide: i is the east/column index and
// j is the north/row index. Torus cell ids are j*w + i.
//
// Truncated trees carry a halo: cells at depth D+1 .. D+halo exist in
// storage and feed neighbor reads, but are never updated by the dynamics.
// The halo must be at least as deep as the longest generator word a rule
// reads, so that letter-by-letter resolution never leaves the node table.

namespace densilab {

enum class TopologyKind { ring, torus2d, tree, product };

enum class TreeFamily {
    involution, // free product of involutions; degree = generator count
    free_group, // free group; degree = 2 * generator count
};

inline int64_t floored_mod(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Neighbor displacement. Rings use a 1-d step, tori a 2-d step, trees a
// word over the generators ('a'..'z' = generator, 'A'..'Z' = its inverse).
struct Offset {
    enum class Kind { step1d, step2d, word };
    Kind kind = Kind::step1d;
    int64_t shift = 0;
    int di = 0;
    int dj = 0;
    std::string letters;

    static Offset step(int64_t s) {
        Offset o;
        o.kind = Kind::step1d;
        o.shift = s;
        return o;
    }
    static Offset step2(int di, int dj) {
        Offset o;
        o.kind = Kind::step2d;
        o.di = di;
        o.dj = dj;
        return o;
    }
    static Offset word(std::string w) {
        Offset o;
        o.kind = Kind::word;
        o.letters = std::move(w);
        return o;
    }
};

// Letter encoding used by tree adjacency tables:
//   involution family: letter g in [0, degree) is generator g, self-inverse.
//   free_group family: letter 2g is generator g, letter 2g+1 its inverse.
inline std::vector<int> parse_tree_word(const std::string& w, TreeFamily family,
                                        int degree) {
    std::vector<int> letters;
    letters.reserve(w.size());
    const int num_gens = family == TreeFamily::free_group ? degree / 2 : degree;
    for (char c : w) {
        int gen;
        bool inverse;
        if (c >= 'a' && c <= 'z') {
            gen = c - 'a';
            inverse = false;
        } else if (c >= 'A' && c <= 'Z') {
            gen = c - 'A';
            inverse = true;
        } else {
            throw std::invalid_argument("tree word: bad character in \"" + w + "\"");
        }
        if (gen >= num_gens)
            throw std::invalid_argument("tree word: generator out of range in \"" +
                                        w + "\"");
        if (family == TreeFamily::free_group)
            letters.push_back(2 * gen + (inverse ? 1 : 0));
        else
            letters.push_back(gen);
    }
    return letters;
}

inline int inverse_letter(int letter, TreeFamily family) {
    return family == TreeFamily::free_group ? (letter ^ 1) : letter;
}

// Removes adjacent letter/inverse pairs until none remain.
inline std::vector<int> reduce_letters(std::vector<int> letters,
                                       TreeFamily family) {
    std::vector<int> out;
    out.reserve(letters.size());
    for (int l : letters) {
        if (!out.empty() && out.back() == inverse_letter(l, family))
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

class Topology;
using TopologyPtr = std::shared_ptr<const Topology>;

class Topology {
public:
    static TopologyPtr make_ring(int64_t n);
    static TopologyPtr make_torus(int64_t w, int64_t h);
    static TopologyPtr make_tree(TreeFamily family, int degree, int depth,
                                 int halo);
    static TopologyPtr make_product(TopologyPtr base, int layers);

    TopologyKind kind() const { return kind_; }

    // Cells the dynamics update. Ids [0, cell_count) are interior.
    int64_t cell_count() const { return cell_count_; }

    // Interior plus halo. Ids [cell_count, storage_count) are halo cells.
    int64_t storage_count() const { return storage_count_; }

    bool is_boundary(int64_t id) const { return id >= cell_count_; }

    // Bit index of a cell in packed storage. Torus rows are padded to whole
    // words so every row starts word-aligned; product layers are padded
    // blocks of the base layout.
    int64_t slot(int64_t id) const {
        switch (kind_) {
        case TopologyKind::ring:
        case TopologyKind::tree:
            return id;
        case TopologyKind::torus2d:
            return (id / width_) * row_words_ * 64 + (id % width_);
        case TopologyKind::product: {
            const int64_t bc = base_->cell_count();
            return (id / bc) * base_->padded_words() * 64 + base_->slot(id % bc);
        }
        }
        return -1;
    }

    // Words per packed configuration.
    int64_t padded_words() const { return padded_words_; }

    // For storage word wi, mask of bits that are real cells (the rest is
    // padding and must stay zero).
    uint64_t word_mask(int64_t wi) const { return word_masks_[size_t(wi)]; }
    const std::vector<uint64_t>& word_masks() const { return word_masks_; }

    // Same, restricted to interior cells. Differs from word_mask only on
    // trees, where halo cells occupy the tail of the storage range.
    uint64_t interior_mask(int64_t wi) const { return interior_masks_[size_t(wi)]; }
    const std::vector<uint64_t>& interior_masks() const { return interior_masks_; }

    // Neighbor of `id` under `o`, or -1 when the walk leaves the node table
    // (truncated trees only; rings and tori always resolve).
    int64_t resolve(int64_t id, const Offset& o) const {
        switch (kind_) {
        case TopologyKind::ring:
            if (o.kind != Offset::Kind::step1d)
                throw std::invalid_argument("ring topology expects 1-d offsets");
            return floored_mod(id + o.shift, cell_count_);
        case TopologyKind::torus2d: {
            if (o.kind != Offset::Kind::step2d)
                throw std::invalid_argument("torus topology expects 2-d offsets");
            const int64_t i = floored_mod(id % width_ + o.di, width_);
            const int64_t j = floored_mod(id / width_ + o.dj, height_);
            return j * width_ + i;
        }
        case TopologyKind::tree: {
            if (o.kind != Offset::Kind::word)
                throw std::invalid_argument("tree topology expects word offsets");
            return resolve_word(id, parse_tree_word(o.letters, family_, degree_));
        }
        case TopologyKind::product: {
            const int64_t bc = base_->cell_count();
            const int64_t b = base_->resolve(id % bc, o);
            return b < 0 ? b : (id / bc) * bc + b;
        }
        }
        return -1;
    }

    int64_t resolve_word(int64_t id, const std::vector<int>& letters) const {
        int64_t cur = id;
        for (int l : letters) {
            cur = adj_[size_t(cur) * degree_ + l];
            if (cur < 0) return -1;
        }
        return cur;
    }

    // Shape accessors; valid only for the matching kind.
    int64_t width() const { return width_; }
    int64_t height() const { return height_; }
    int layers() const { return layers_; }
    const TopologyPtr& base() const { return base_; }

    TreeFamily family() const { return family_; }
    int degree() const { return degree_; }
    int tree_depth() const { return depth_; }
    int tree_halo() const { return halo_; }
    int node_depth(int64_t id) const { return node_depth_[size_t(id)]; }
    int64_t step_letter(int64_t id, int letter) const {
        return adj_[size_t(id) * degree_ + letter];
    }

    // Reduced word of a tree node, for diagnostics and tests.
    std::string node_word(int64_t id) const {
        std::string out;
        for (int64_t cur = id; cur != 0; cur = parent_[size_t(cur)]) {
            const int l = incoming_[size_t(cur)];
            char c;
            if (family_ == TreeFamily::free_group)
                c = char(((l & 1) ? 'A' : 'a') + l / 2);
            else
                c = char('a' + l);
            out.push_back(c);
        }
        return {out.rbegin(), out.rend()};
    }

private:
    Topology() = default;

    void init_masks() {
        word_masks_.assign(size_t(padded_words_), 0);
        interior_masks_.assign(size_t(padded_words_), 0);
        for (int64_t id = 0; id < storage_count_; ++id) {
            const int64_t s = slot(id);
            word_masks_[size_t(s >> 6)] |= uint64_t(1) << (s & 63);
            if (id < cell_count_)
                interior_masks_[size_t(s >> 6)] |= uint64_t(1) << (s & 63);
        }
    }

    TopologyKind kind_ = TopologyKind::ring;
    int64_t cell_count_ = 0;
    int64_t storage_count_ = 0;
    int64_t padded_words_ = 0;
    std::vector<uint64_t> word_masks_;
    std::vector<uint64_t> interior_masks_;

    int64_t width_ = 0, height_ = 0, row_words_ = 0;

    TopologyPtr base_;
    int layers_ = 0;

    TreeFamily family_ = TreeFamily::involution;
    int degree_ = 0, depth_ = 0, halo_ = 0;
    std::vector<int32_t> adj_;
    std::vector<int32_t> parent_;
    std::vector<int8_t> incoming_;
    std::vector<int16_t> node_depth_;
};

inline TopologyPtr Topology::make_ring(int64_t n) {
    if (n < 1) throw std::invalid_argument("ring: size must be positive");
    auto t = std::shared_ptr<Topology>(new Topology());
    t->kind_ = TopologyKind::ring;
    t->cell_count_ = t->storage_count_ = n;
    t->padded_words_ = (n + 63) / 64;
    t->init_masks();
    return t;
}

inline TopologyPtr Topology::make_torus(int64_t w, int64_t h) {
    if (w < 1 || h < 1) throw std::invalid_argument("torus: sides must be positive");
    auto t = std::shared_ptr<Topology>(new Topology());
    t->kind_ = TopologyKind::torus2d;
    t->width_ = w;
    t->height_ = h;
    t->row_words_ = (w + 63) / 64;
    t->cell_count_ = t->storage_count_ = w * h;
    t->padded_words_ = h * t->row_words_;
    t->init_masks();
    return t;
}

inline TopologyPtr Topology::make_tree(TreeFamily family, int degree, int depth,
                                       int halo) {
    if (degree < 2) throw std::invalid_argument("tree: degree must be >= 2");
    if (family == TreeFamily::free_group && degree % 2 != 0)
        throw std::invalid_argument("tree: free group degree must be even");
    if (depth < 0 || halo < 0)
        throw std::invalid_argument("tree: depth and halo must be non-negative");

    const int total_depth = depth + halo;
    int64_t total = 1, level = 1;
    for (int d = 1; d <= total_depth; ++d) {
        level *= d == 1 ? degree : degree - 1;
        total += level;
        if (total > (int64_t(1) << 25))
            throw std::invalid_argument("tree: node count exceeds limit");
    }

    auto t = std::shared_ptr<Topology>(new Topology());
    t->kind_ = TopologyKind::tree;
    t->family_ = family;
    t->degree_ = degree;
    t->depth_ = depth;
    t->halo_ = halo;
    t->adj_.assign(size_t(total) * degree, -1);
    t->parent_.assign(size_t(total), -1);
    t->incoming_.assign(size_t(total), -1);
    t->node_depth_.assign(size_t(total), 0);

    // BFS by level; children are assigned ids in letter order, so ids are
    // sorted by depth and the layout is deterministic.
    int64_t next_id = 1;
    std::vector<int64_t> frontier = {0};
    for (int d = 1; d <= total_depth; ++d) {
        std::vector<int64_t> next_frontier;
        next_frontier.reserve(size_t(frontier.size()) * (degree - 1) + 1);
        for (int64_t u : frontier) {
            const int back =
                u == 0 ? -1 : inverse_letter(t->incoming_[size_t(u)], family);
            for (int l = 0; l < degree; ++l) {
                if (l == back) continue;
                const int64_t v = next_id++;
                t->adj_[size_t(u) * degree + l] = int32_t(v);
                t->adj_[size_t(v) * degree + inverse_letter(l, family)] =
                    int32_t(u);
                t->parent_[size_t(v)] = int32_t(u);
                t->incoming_[size_t(v)] = int8_t(l);
                t->node_depth_[size_t(v)] = int16_t(d);
                next_frontier.push_back(v);
            }
        }
        frontier = std::move(next_frontier);
        if (d == depth) t->cell_count_ = next_id;
    }
    if (depth == 0) t->cell_count_ = 1;
    t->storage_count_ = next_id;
    t->padded_words_ = (t->storage_count_ + 63) / 64;
    t->init_masks();
    return t;
}

inline TopologyPtr Topology::make_product(TopologyPtr base, int layers) {
    if (!base) throw std::invalid_argument("product: base topology required");
    if (layers < 1) throw std::invalid_argument("product: layers must be positive");
    if (base->kind() == TopologyKind::tree || base->kind() == TopologyKind::product)
        throw std::invalid_argument(
            "product: base must be a ring or torus (halo-free, single level)");
    auto t = std::shared_ptr<Topology>(new Topology());
    t->kind_ = TopologyKind::product;
    t->base_ = std::move(base);
    t->layers_ = layers;
    t->cell_count_ = t->storage_count_ = t->base_->cell_count() * layers;
    t->padded_words_ = t->base_->padded_words() * layers;
    t->init_masks();
    return t;
}

} // namespace densilab
