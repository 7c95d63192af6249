#include <doctest.h>

#include <algorithm>

#include "svt/errors.hpp"
#include "svt/retrieval.hpp"
#include "test_util.hpp"

using namespace svt;
using namespace svtest;

TEST_SUITE_BEGIN("retrieval");

namespace {

Gallery random_gallery(Rng& rng, const Taxonomy& t, std::size_t n,
                       std::size_t dim) {
    Gallery g;
    const auto& leaves = t.leaves();
    for (std::size_t i = 0; i < n; ++i) {
        g.embeddings.push_back(random_unit_vector(rng, dim));
        g.ids.push_back("s" + std::to_string(i));
        g.leaves.push_back(leaves[rng.below(leaves.size())]);
    }
    return g;
}

}  // namespace

TEST_CASE("knn basics") {
    const Taxonomy t = t0();
    Gallery g;
    g.embeddings = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    g.ids = {"x", "y", "z"};
    g.leaves = {t.leaves()[0], t.leaves()[1], t.leaves()[2]};

    SUBCASE("zero distance wins at k=1") {
        const auto ids = knn(g, {0, 1, 0}, 1);
        CHECK(ids == std::vector<std::size_t>{1});
    }
    SUBCASE("k = gallery size returns the full order") {
        const auto ids = knn(g, {1, 0, 0}, 3);
        CHECK(ids.size() == 3);
        CHECK(ids[0] == 0);
    }
    SUBCASE("self exclusion") {
        const auto ids = knn(g, g.embeddings[0], 2, std::size_t{0});
        CHECK(std::find(ids.begin(), ids.end(), 0) == ids.end());
    }
    SUBCASE("k too large / zero") {
        CHECK_THROWS_AS(knn(g, {1, 0, 0}, 4), KTooLarge);
        CHECK_THROWS_AS(knn(g, {1, 0, 0}, 3, std::size_t{0}), KTooLarge);
        CHECK_THROWS_AS(knn(g, {1, 0, 0}, 0), KTooLarge);
    }
    SUBCASE("ids wrapper excludes by id") {
        const auto ids = knn_ids(g, g.embeddings[2], 2, std::string("z"));
        CHECK(ids.size() == 2);
        CHECK(std::find(ids.begin(), ids.end(), "z") == ids.end());
    }
}

TEST_CASE("knn matches the exhaustive sort oracle") {
    Rng rng(2718);
    const Taxonomy t = t0();
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        const Gallery g = random_gallery(rng, t, n, 6);
        const Embedding q = random_unit_vector(rng, 6);
        const std::size_t k = 1 + rng.below(n);
        CHECK(knn(g, q, k) == knn_oracle(g, q, k, std::nullopt));
        if (k < n)
            CHECK(knn(g, q, k, std::size_t{0}) ==
                  knn_oracle(g, q, k, std::size_t{0}));
    }
}

TEST_CASE("duplicated gallery gives perfect recall at every level") {
    const Taxonomy t = t0();
    Rng rng(11);
    Gallery queries = random_gallery(rng, t, 12, 5);
    Gallery gallery = queries;
    for (std::size_t i = 0; i < gallery.ids.size(); ++i)
        gallery.ids[i] += "-copy";  // distinct ids, same points and leaves

    for (int level = 0; level <= 2; ++level) {
        const auto r = recall_at_k(t, queries, gallery, {1}, level);
        CHECK(r[0] == 1.0);
    }
}

TEST_CASE("recall matches the double-loop oracle") {
    Rng rng(31415);
    const Taxonomy t = t0();
    for (int trial = 0; trial < 30; ++trial) {
        const Gallery g = random_gallery(rng, t, 10, 4);
        for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{9}})
            for (int level : {1, 2}) {
                const auto got = recall_at_k(t, g, g, {k}, level);
                CHECK(got[0] ==
                      doctest::Approx(recall_oracle(t, g, g, k, level, true))
                          .epsilon(1e-12));
            }
    }
}

TEST_CASE("recall is monotone in k and toward the root") {
    Rng rng(161803);
    const Taxonomy t = t0();
    for (int trial = 0; trial < 20; ++trial) {
        const Gallery g = random_gallery(rng, t, 24, 4);
        const std::vector<std::size_t> ks{1, 2, 4, 8, 16};
        const std::vector<int> levels{1, 2};
        const RecallReport report = evaluate_recall(t, g, g, ks, levels);
        for (std::size_t li = 0; li < levels.size(); ++li)
            for (std::size_t ki = 0; ki + 1 < ks.size(); ++ki)
                CHECK(report.values(li, ki) <= report.values(li, ki + 1));
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            CHECK(report.values(0, ki) >= report.values(1, ki));
    }
}

TEST_CASE("gallery permutation leaves recall unchanged") {
    Rng rng(999);
    const Taxonomy t = t0();
    const Gallery g = random_gallery(rng, t, 30, 4);

    Gallery shuffled;
    std::vector<std::size_t> perm(g.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    perm = rng.sample_without_replacement(perm, perm.size());
    for (std::size_t i : perm) {
        shuffled.embeddings.push_back(g.embeddings[i]);
        shuffled.ids.push_back(g.ids[i]);
        shuffled.leaves.push_back(g.leaves[i]);
    }

    // same queries against both gallery orders (distinct query ids, so no
    // self-exclusion ambiguity)
    Gallery queries = random_gallery(rng, t, 8, 4);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}})
        for (int level : {1, 2})
            CHECK(recall_at_k(t, queries, g, {k}, level) ==
                  recall_at_k(t, queries, shuffled, {k}, level));
}

TEST_CASE("bad level is rejected") {
    const Taxonomy t = t0();
    Rng rng(1);
    const Gallery g = random_gallery(rng, t, 5, 3);
    CHECK_THROWS_AS(recall_at_k(t, g, g, {1}, 5), BadLevel);
}

TEST_CASE("mean top-1 mismatch dissimilarity") {
    const Taxonomy t = t0();
    const NodeId a1 = leaf(t, {"A", "a1"});
    const NodeId a2 = leaf(t, {"A", "a2"});
    const NodeId b1 = leaf(t, {"B", "b1"});

    // the nearest wrong-class neighbor of each query is hand-placed
    Gallery g;
    g.embeddings = {{1, 0}, {0.98, std::sqrt(1 - 0.98 * 0.98)}, {0, 1}};
    g.ids = {"q", "near", "far"};
    g.leaves = {a1, a2, b1};

    // query "q": nearest mismatch is "near" (class a2), d_G = 0.5
    // query "near": nearest mismatch is "q" (class a1), d_G = 0.5
    // query "far": nearest mismatch is "near", d_G = 1.0
    const double expected = (0.5 + 0.5 + 1.0) / 3.0;
    CHECK(mean_top1_mismatch_dissimilarity(t, g, g) ==
          doctest::Approx(expected).epsilon(1e-12));

    // single-class gallery has no mismatches to count
    Gallery mono;
    mono.embeddings = {{1, 0}, {0, 1}};
    mono.ids = {"a", "b"};
    mono.leaves = {a1, a1};
    CHECK(mean_top1_mismatch_dissimilarity(t, mono, mono) == 0.0);
}

TEST_SUITE_END();
