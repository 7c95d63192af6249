#include <doctest.h>

#include <cmath>

#include "svt/errors.hpp"
#include "svt/margins.hpp"
#include "test_util.hpp"

using namespace svt;
using namespace svtest;

TEST_SUITE_BEGIN("margins");

namespace {

Embedding unit2(double x, double y) { return {x, y}; }

// one arbitrary unit embedding per sample, count per class
EmbeddingsByClass fake_embeddings(const Taxonomy& t, int per_class,
                                  std::uint64_t seed) {
    Rng rng(seed);
    EmbeddingsByClass out;
    for (NodeId leaf : t.leaves())
        for (int i = 0; i < per_class; ++i)
            out[leaf].push_back(random_unit_vector(rng, 4));
    return out;
}

}  // namespace

TEST_CASE("semantic margin arithmetic on t0") {
    const Taxonomy t = t0();
    const NodeId a1 = leaf(t, {"A", "a1"});
    const NodeId a2 = leaf(t, {"A", "a2"});
    const NodeId b1 = leaf(t, {"B", "b1"});

    MarginConfig cfg;
    cfg.gamma = 1.0;
    cfg.beta = 0.0;
    CHECK(semantic_margin(t, cfg, a1, a2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(semantic_margin(t, cfg, a1, b1) == doctest::Approx(1.0).epsilon(1e-12));

    cfg.gamma = 2.0;
    cfg.beta = 0.1;
    CHECK(semantic_margin(t, cfg, a1, b1) == doctest::Approx(2.1).epsilon(1e-12));

    cfg.gamma = 1.0;
    cfg.beta = 0.0;
    CHECK_THROWS_AS(semantic_margin(t, cfg, a1, a1), SameClass);
}

TEST_CASE("mean semantic margin on t0") {
    const Taxonomy t = t0();
    MarginConfig cfg;  // gamma 1, beta 0
    // pairs: (a1,a2)=0.5, (a1,b1)=1, (a2,b1)=1
    CHECK(mean_semantic_margin(t, cfg) ==
          doctest::Approx(2.5 / 3.0).epsilon(1e-12));
}

TEST_CASE("visual similarity hand values") {
    CHECK(visual_similarity({unit2(1, 0)}, {unit2(1, 0)}) == 0.0);
    CHECK(visual_similarity({unit2(1, 0)}, {unit2(0, 1)}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(visual_similarity({unit2(1, 0), unit2(0, 1)}, {unit2(1, 0)}) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(visual_similarity({}, {unit2(1, 0)}), EmptyClass);
}

TEST_CASE("pair cap: no-op when cap covers all pairs, exact subsample below") {
    Rng rng(31);
    std::vector<Embedding> a, b;
    for (int i = 0; i < 5; ++i) a.push_back(random_unit_vector(rng, 3));
    for (int i = 0; i < 7; ++i) b.push_back(random_unit_vector(rng, 3));

    const double exact = visual_similarity(a, b);
    CHECK(visual_similarity_capped(a, b, 35, 123) == exact);   // cap == m*n
    CHECK(visual_similarity_capped(a, b, 100, 123) == exact);  // cap > m*n

    const double capped = visual_similarity_capped(a, b, 10, 123);
    CHECK(capped == visual_similarity_capped(a, b, 10, 123));  // seeded
    CHECK(capped >= 0.0);
    CHECK(capped <= 2.0);

    // when every cross distance is equal, any subsample gives that value
    std::vector<Embedding> north(4, unit2(0, 1));
    std::vector<Embedding> east(6, unit2(1, 0));
    CHECK(visual_similarity_capped(north, east, 5, 99) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("epoch-1 table is purely semantic") {
    const Taxonomy t = t0();
    MarginConfig cfg;
    cfg.alpha = 0.25;
    const MarginTable table = MarginTable::build(t, cfg, 1, std::nullopt);
    CHECK(table.epoch() == 1);
    CHECK(table.combined_matrix() == table.semantic_matrix());
    for (double v : table.visual_matrix().data()) CHECK(v == 0.0);
}

TEST_CASE("height cutoff gates the visual term") {
    const Taxonomy t = t0();
    const NodeId a1 = leaf(t, {"A", "a1"});
    const NodeId a2 = leaf(t, {"A", "a2"});
    const NodeId b1 = leaf(t, {"B", "b1"});

    MarginConfig cfg;
    cfg.visual_height_cutoff = 1;  // siblings only: lcs(a1,a2)=A at height 1
    const auto embs = fake_embeddings(t, 3, 8);
    const MarginTable table = MarginTable::build(t, cfg, 2, embs);

    CHECK(table.visual(a1, a2) ==
          doctest::Approx(visual_similarity(embs.at(a1), embs.at(a2)))
              .epsilon(1e-12));
    CHECK(table.visual(a1, b1) == 0.0);  // lcs is the root at height 2
    CHECK(table.combined(a1, b1) == table.semantic(a1, b1));
    CHECK(table.combined(a1, a2) ==
          doctest::Approx(table.semantic(a1, a2) + cfg.alpha * table.visual(a1, a2))
              .epsilon(1e-12));
}

TEST_CASE("alpha zero keeps combined equal to semantic at any epoch") {
    const Taxonomy t = t0();
    MarginConfig cfg;
    cfg.alpha = 0.0;
    const MarginTable table =
        MarginTable::build(t, cfg, 3, fake_embeddings(t, 2, 9));
    CHECK(table.combined_matrix() == table.semantic_matrix());
}

TEST_CASE("missing embeddings are rejected after epoch 1") {
    const Taxonomy t = t0();
    MarginConfig cfg;
    CHECK_THROWS_AS(MarginTable::build(t, cfg, 2, std::nullopt),
                    MissingEmbeddings);

    auto embs = fake_embeddings(t, 2, 10);
    embs.erase(leaf(t, {"B", "b1"}));
    CHECK_THROWS_AS(MarginTable::build(t, cfg, 2, embs), MissingEmbeddings);
}

TEST_CASE("matrices are exactly symmetric and visual is bounded") {
    Rng rng(77);
    const Taxonomy t = Taxonomy::build(random_tree_paths(rng, 40, 4));
    MarginConfig cfg;
    cfg.alpha = 0.3;
    EmbeddingsByClass embs;
    for (NodeId leaf_id : t.leaves()) {
        const int count = 1 + static_cast<int>(rng.below(4));
        for (int i = 0; i < count; ++i)
            embs[leaf_id].push_back(random_unit_vector(rng, 5));
    }
    const MarginTable table = MarginTable::build(t, cfg, 2, embs);

    const std::size_t n = table.classes().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(table.semantic_matrix()(i, j) == table.semantic_matrix()(j, i));
            CHECK(table.visual_matrix()(i, j) == table.visual_matrix()(j, i));
            CHECK(table.combined_matrix()(i, j) == table.combined_matrix()(j, i));
            if (i == j) continue;
            CHECK(table.visual_matrix()(i, j) >= 0.0);
            CHECK(table.visual_matrix()(i, j) <= 2.0 + 1e-12);
            CHECK(table.combined_matrix()(i, j) <=
                  table.semantic_matrix()(i, j) + 2.0 * cfg.alpha + 1e-12);
        }
}

TEST_CASE("semantic margins are ordered by lcs height") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Taxonomy t = Taxonomy::build(random_tree_paths(rng, 60, 5));
        MarginConfig cfg;
        cfg.gamma = 0.7;
        cfg.beta = 0.05;
        const auto& leaves = t.leaves();
        for (int k = 0; k < 200; ++k) {
            const NodeId u = leaves[rng.below(leaves.size())];
            const NodeId v = leaves[rng.below(leaves.size())];
            const NodeId w = leaves[rng.below(leaves.size())];
            if (u == v || u == w || v == w) continue;
            const int h_uv = t.node(t.lcs(u, v)).height;
            const int h_uw = t.node(t.lcs(u, w)).height;
            if (h_uv < h_uw)
                CHECK(semantic_margin(t, cfg, u, v) <
                      semantic_margin(t, cfg, u, w));
        }
    }
}

TEST_CASE("fixed table: constant combined margin, visual still refreshed") {
    const Taxonomy t = t0();
    const NodeId a1 = leaf(t, {"A", "a1"});
    const NodeId a2 = leaf(t, {"A", "a2"});
    MarginConfig cfg;
    const auto embs = fake_embeddings(t, 2, 11);
    const MarginTable table = MarginTable::build_fixed(t, cfg, 2, 0.75, embs);

    CHECK(table.combined(a1, a2) == 0.75);
    CHECK(table.semantic(a1, a2) == 0.75);
    CHECK(table.visual(a1, a2) ==
          doctest::Approx(visual_similarity(embs.at(a1), embs.at(a2)))
              .epsilon(1e-12));
}

TEST_CASE("unknown class lookups throw") {
    const Taxonomy t = t0();
    const MarginTable table = MarginTable::build(t, MarginConfig{}, 1, std::nullopt);
    CHECK_THROWS_AS(table.row_of(9999), UnknownClass);
}

TEST_CASE("config invariants are enforced at build time") {
    const Taxonomy t = t0();
    MarginConfig cfg;
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(MarginTable::build(t, cfg, 1, std::nullopt),
                    std::invalid_argument);
    cfg.gamma = 1.0;
    cfg.alpha = -0.1;
    CHECK_THROWS_AS(MarginTable::build(t, cfg, 1, std::nullopt),
                    std::invalid_argument);
    cfg.alpha = 0.1;
    cfg.visual_pair_cap = 0;
    CHECK_THROWS_AS(MarginTable::build(t, cfg, 1, std::nullopt),
                    std::invalid_argument);
    CHECK_THROWS_AS(visual_similarity_capped({unit2(1, 0)}, {unit2(0, 1)}, 0, 1),
                    std::invalid_argument);
}

TEST_SUITE_END();
