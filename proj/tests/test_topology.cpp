#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "densilab/rng.hpp"
#include "densilab/topology.hpp"

namespace densilab {
namespace {

TEST(Ring, ResolveWrapsBothDirections) {
    auto t = Topology::make_ring(10);
    EXPECT_EQ(t->cell_count(), 10);
    EXPECT_EQ(t->resolve(0, Offset::step(1)), 1);
    EXPECT_EQ(t->resolve(9, Offset::step(1)), 0);
    EXPECT_EQ(t->resolve(0, Offset::step(-1)), 9);
    EXPECT_EQ(t->resolve(0, Offset::step(-3)), 7);
    EXPECT_EQ(t->resolve(5, Offset::step(23)), 8);
    EXPECT_EQ(t->resolve(5, Offset::step(-23)), 2);
}

TEST(Ring, SlotsAreIdentityAndMaskCoversExactlyN) {
    auto t = Topology::make_ring(70);
    EXPECT_EQ(t->padded_words(), 2);
    for (int64_t id = 0; id < 70; ++id) EXPECT_EQ(t->slot(id), id);
    int64_t bits = 0;
    for (int64_t w = 0; w < t->padded_words(); ++w)
        bits += std::popcount(t->word_mask(w));
    EXPECT_EQ(bits, 70);
    EXPECT_EQ(t->word_mask(0), ~uint64_t(0));
    EXPECT_EQ(t->word_mask(1), (uint64_t(1) << 6) - 1);
}

TEST(Torus, IdConventionIsRowMajorWithEastwardI) {
    auto t = Topology::make_torus(5, 3);
    // id = j*w + i.
    const int64_t id = 2 * 5 + 3; // i=3, j=2
    EXPECT_EQ(t->resolve(id, Offset::step2(1, 0)), 2 * 5 + 4);
    EXPECT_EQ(t->resolve(id, Offset::step2(-1, 0)), 2 * 5 + 2);
    EXPECT_EQ(t->resolve(id, Offset::step2(0, 1)), 0 * 5 + 3); // j wraps 2->0
    EXPECT_EQ(t->resolve(id, Offset::step2(0, -1)), 1 * 5 + 3);
    EXPECT_EQ(t->resolve(0, Offset::step2(-1, -1)), 2 * 5 + 4);
}

TEST(Torus, PaddedRowLayout) {
    auto t = Topology::make_torus(65, 4);
    // Each row takes two words; slot of (i, j) is j*128 + i.
    EXPECT_EQ(t->padded_words(), 8);
    EXPECT_EQ(t->slot(0), 0);
    EXPECT_EQ(t->slot(64), 64);        // i=64, j=0
    EXPECT_EQ(t->slot(65), 128);       // i=0, j=1
    EXPECT_EQ(t->slot(3 * 65 + 7), 3 * 128 + 7);
    int64_t bits = 0;
    for (int64_t w = 0; w < t->padded_words(); ++w)
        bits += std::popcount(t->word_mask(w));
    EXPECT_EQ(bits, 65 * 4);
    EXPECT_EQ(t->word_mask(1), uint64_t(1)); // one valid bit in each row tail
}

TEST(Tree, FreeGroupDepthTwoHasSeventeenInteriorNodes) {
    auto t = Topology::make_tree(TreeFamily::free_group, 4, 2, 1);
    EXPECT_EQ(t->cell_count(), 1 + 4 + 12);
    EXPECT_EQ(t->storage_count(), 17 + 36);
    for (int64_t id = 0; id < t->storage_count(); ++id)
        EXPECT_EQ(t->is_boundary(id), t->node_depth(id) > 2);
}

TEST(Tree, InvolutionLevelCounts) {
    auto t = Topology::make_tree(TreeFamily::involution, 3, 4, 0);
    // Levels: 1, 3, 6, 12, 24.
    EXPECT_EQ(t->cell_count(), 1 + 3 + 6 + 12 + 24);
    std::vector<int64_t> per_level(5, 0);
    for (int64_t id = 0; id < t->cell_count(); ++id)
        ++per_level[size_t(t->node_depth(id))];
    EXPECT_EQ(per_level, (std::vector<int64_t>{1, 3, 6, 12, 24}));
}

TEST(Tree, IdsSortedByDepth) {
    auto t = Topology::make_tree(TreeFamily::free_group, 4, 3, 2);
    for (int64_t id = 1; id < t->storage_count(); ++id)
        EXPECT_GE(t->node_depth(id), t->node_depth(id - 1));
}

TEST(Tree, InvolutionGeneratorsAreSelfInverse) {
    auto t = Topology::make_tree(TreeFamily::involution, 3, 3, 1);
    for (int64_t id = 0; id < t->cell_count(); ++id)
        for (int l = 0; l < 3; ++l) {
            const int64_t v = t->step_letter(id, l);
            ASSERT_GE(v, 0);
            EXPECT_EQ(t->step_letter(v, l), id);
        }
}

TEST(Tree, FreeGroupInverseRoundTrip) {
    auto t = Topology::make_tree(TreeFamily::free_group, 4, 3, 2);
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int64_t id = int64_t(rng.bounded(uint64_t(t->cell_count())));
        std::string w, winv;
        const char* letters = "aAbB";
        for (int k = 0; k < 2; ++k) {
            const char c = letters[rng.bounded(4)];
            w.push_back(c);
            const char inv = char(c >= 'a' ? c - 'a' + 'A' : c - 'A' + 'a');
            winv.insert(winv.begin(), inv);
        }
        const int64_t mid = t->resolve(id, Offset::word(w));
        if (mid < 0) continue; // walk left the halo, nothing to check
        EXPECT_EQ(t->resolve(mid, Offset::word(winv)), id)
            << "id=" << id << " w=" << w;
    }
}

TEST(Tree, NodeWordsMatchResolution) {
    auto t = Topology::make_tree(TreeFamily::free_group, 4, 2, 2);
    EXPECT_EQ(t->node_word(0), "");
    const int64_t ab = t->resolve(0, Offset::word("ab"));
    ASSERT_GE(ab, 0);
    EXPECT_EQ(t->node_word(ab), "ab");
    const int64_t aB = t->resolve(0, Offset::word("aB"));
    ASSERT_GE(aB, 0);
    EXPECT_EQ(t->node_word(aB), "aB");
    EXPECT_NE(ab, aB);
    // Reduced walk: a then A returns to the root.
    const int64_t a = t->resolve(0, Offset::word("a"));
    EXPECT_EQ(t->resolve(a, Offset::word("A")), 0);
}

TEST(Tree, ResolutionLeavingHaloReturnsMinusOne) {
    auto t = Topology::make_tree(TreeFamily::free_group, 4, 1, 1);
    // Depth 1 + halo 1 stores depth <= 2; a length-2 forward walk from a
    // depth-1 node would land at depth 3.
    const int64_t a = t->resolve(0, Offset::word("a"));
    ASSERT_GE(a, 0);
    EXPECT_EQ(t->resolve(a, Offset::word("ab")), -1);
}

TEST(Tree, ParseRejectsBadWords) {
    EXPECT_THROW(parse_tree_word("a1", TreeFamily::free_group, 4),
                 std::invalid_argument);
    EXPECT_THROW(parse_tree_word("c", TreeFamily::free_group, 4),
                 std::invalid_argument);
    EXPECT_NO_THROW(parse_tree_word("c", TreeFamily::involution, 3));
    EXPECT_THROW(parse_tree_word("d", TreeFamily::involution, 3),
                 std::invalid_argument);
}

TEST(Tree, ReduceLetters) {
    // Free group: aA cancels.
    auto r = reduce_letters(parse_tree_word("aAb", TreeFamily::free_group, 4),
                            TreeFamily::free_group);
    EXPECT_EQ(r, parse_tree_word("b", TreeFamily::free_group, 4));
    // Involution: aa cancels.
    auto s = reduce_letters(parse_tree_word("baab", TreeFamily::involution, 2),
                            TreeFamily::involution);
    EXPECT_TRUE(s.empty());
    // Reduction is idempotent.
    auto once = reduce_letters(parse_tree_word("abBAab", TreeFamily::free_group, 4),
                               TreeFamily::free_group);
    EXPECT_EQ(reduce_letters(once, TreeFamily::free_group), once);
}

TEST(Product, LayersAreIndependentBlocks) {
    auto base = Topology::make_ring(10);
    auto t = Topology::make_product(base, 4);
    EXPECT_EQ(t->cell_count(), 40);
    EXPECT_EQ(t->layers(), 4);
    // Steps stay within a layer.
    EXPECT_EQ(t->resolve(13, Offset::step(1)), 14);
    EXPECT_EQ(t->resolve(19, Offset::step(1)), 10); // ring wrap inside layer 1
    EXPECT_EQ(t->resolve(30, Offset::step(-1)), 39);
    // Layer blocks are padded copies of the base layout.
    EXPECT_EQ(t->padded_words(), 4 * base->padded_words());
    EXPECT_EQ(t->slot(10), base->padded_words() * 64 + 0);
}

TEST(Product, TorusBase) {
    auto base = Topology::make_torus(6, 4);
    auto t = Topology::make_product(base, 3);
    EXPECT_EQ(t->cell_count(), 72);
    const int64_t id = 2 * 24 + (1 * 6 + 5); // layer 2, i=5, j=1
    EXPECT_EQ(t->resolve(id, Offset::step2(1, 0)), 2 * 24 + (1 * 6 + 0));
    EXPECT_EQ(t->resolve(id, Offset::step2(0, 1)), 2 * 24 + (2 * 6 + 5));
}

TEST(Product, RejectsTreeAndNestedBases) {
    auto tree = Topology::make_tree(TreeFamily::free_group, 4, 2, 1);
    EXPECT_THROW(Topology::make_product(tree, 2), std::invalid_argument);
    auto prod = Topology::make_product(Topology::make_ring(4), 2);
    EXPECT_THROW(Topology::make_product(prod, 2), std::invalid_argument);
}

TEST(Factories, RejectBadShapes) {
    EXPECT_THROW(Topology::make_ring(0), std::invalid_argument);
    EXPECT_THROW(Topology::make_torus(0, 5), std::invalid_argument);
    EXPECT_THROW(Topology::make_tree(TreeFamily::free_group, 3, 2, 1),
                 std::invalid_argument);
    EXPECT_THROW(Topology::make_tree(TreeFamily::involution, 1, 2, 1),
                 std::invalid_argument);
    EXPECT_THROW(Topology::make_tree(TreeFamily::involution, 3, -1, 0),
                 std::invalid_argument);
    EXPECT_THROW(Topology::make_product(nullptr, 2), std::invalid_argument);
    EXPECT_THROW(Topology::make_tree(TreeFamily::involution, 3, 40, 0),
                 std::invalid_argument);
}

TEST(Offsets, KindMismatchThrows) {
    auto ring = Topology::make_ring(5);
    EXPECT_THROW(ring->resolve(0, Offset::step2(1, 0)), std::invalid_argument);
    auto torus = Topology::make_torus(4, 4);
    EXPECT_THROW(torus->resolve(0, Offset::step(1)), std::invalid_argument);
    auto tree = Topology::make_tree(TreeFamily::involution, 3, 2, 1);
    EXPECT_THROW(tree->resolve(0, Offset::step(1)), std::invalid_argument);
}

TEST(FlooredMod, NegativeOperands) {
    EXPECT_EQ(floored_mod(-1, 10), 9);
    EXPECT_EQ(floored_mod(-10, 10), 0);
    EXPECT_EQ(floored_mod(-11, 10), 9);
    EXPECT_EQ(floored_mod(7, 10), 7);
}

} // namespace
} // namespace densilab
