#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "svt/embedder.hpp"
#include "svt/linalg.hpp"
#include "svt/taxonomy.hpp"

namespace svt {

struct MarginConfig {
    double gamma = 1.0;   // scales the tree dissimilarity; must stay > 0
    double beta = 0.0;    // additive bias on the semantic margin
    double alpha = 0.1;   // weight of the visual term; small by design
    int visual_height_cutoff = 2;  // visual term applies iff height(lcs) <= cutoff
    std::optional<std::size_t> visual_pair_cap;  // max sampled cross pairs per class pair
};

using EmbeddingsByClass = std::map<NodeId, std::vector<Embedding>>;

/// gamma * dissimilarity(u, v) + beta for distinct leaf classes.
double semantic_margin(const Taxonomy& t, const MarginConfig& cfg, NodeId u,
                       NodeId v);

/// Mean of semantic_margin over all distinct leaf pairs; the natural fixed
/// margin for a non-adaptive control run.
double mean_semantic_margin(const Taxonomy& t, const MarginConfig& cfg);

/// Mean Euclidean distance over all cross pairs of two classes. Despite the
/// name, larger values mean less alike. Throws EmptyClass on an empty side.
double visual_similarity(const std::vector<Embedding>& class_a,
                         const std::vector<Embedding>& class_b);

/// Same, but when cap < |a|*|b| averages a seeded uniform subsample of
/// exactly cap distinct cross pairs. With cap >= |a|*|b| this is bitwise
/// identical to the exact computation.
double visual_similarity_capped(const std::vector<Embedding>& class_a,
                                const std::vector<Embedding>& class_b,
                                std::size_t cap, std::uint64_t seed);

/// Per-leaf-class-pair margins, rebuilt once per epoch. All three matrices
/// are symmetric with unused diagonals; visual entries of pairs whose LCS
/// sits above the height cutoff are stored as 0 so the combined table stays
/// total over class pairs.
class MarginTable {
public:
    /// Epoch 1 starts from zero visual similarity, so the combined margins
    /// equal the semantic ones; later epochs need the current embeddings of
    /// every leaf class (MissingEmbeddings otherwise) and fold the visual
    /// term in as semantic + alpha * visual.
    static MarginTable build(const Taxonomy& t, const MarginConfig& cfg,
                             int epoch,
                             const std::optional<EmbeddingsByClass>& embeddings);

    /// Control table: combined margin is the same constant for every pair.
    /// The visual matrix is still refreshed (same rules as build) so batch
    /// sampling behaves identically to the adaptive run.
    static MarginTable build_fixed(const Taxonomy& t, const MarginConfig& cfg,
                                   int epoch, double fixed_margin,
                                   const std::optional<EmbeddingsByClass>& embeddings);

    int epoch() const { return epoch_; }
    const std::vector<NodeId>& classes() const { return classes_; }

    std::size_t row_of(NodeId leaf) const;  // throws UnknownClass
    bool has_class(NodeId leaf) const;

    double semantic(NodeId u, NodeId v) const { return semantic_(row_of(u), row_of(v)); }
    double visual(NodeId u, NodeId v) const { return visual_(row_of(u), row_of(v)); }
    double combined(NodeId u, NodeId v) const { return combined_(row_of(u), row_of(v)); }

    const Matrix& semantic_matrix() const { return semantic_; }
    const Matrix& visual_matrix() const { return visual_; }
    const Matrix& combined_matrix() const { return combined_; }

private:
    MarginTable() = default;
    void fill_visual(const Taxonomy& t, const MarginConfig& cfg, int epoch,
                     const std::optional<EmbeddingsByClass>& embeddings);

    int epoch_ = 1;
    std::vector<NodeId> classes_;       // taxonomy leaves, ascending NodeId
    std::map<NodeId, std::size_t> row_; // leaf -> matrix row
    Matrix semantic_, visual_, combined_;
};

}  // namespace svt
