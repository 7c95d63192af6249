#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svt/dataset.hpp"
#include "svt/embedder.hpp"
#include "svt/linalg.hpp"
#include "svt/taxonomy.hpp"

namespace svt {

/// Searchable set of embedded samples: parallel lists of embeddings, ids,
/// and leaf classes. Read-only once built.
struct Gallery {
    std::vector<Embedding> embeddings;
    std::vector<std::string> ids;
    std::vector<NodeId> leaves;

    std::size_t size() const { return embeddings.size(); }
};

/// Embeds every dataset sample with the given parameters, in file order.
Gallery embed_gallery(const EmbedderParams& params, const Dataset& dataset);

/// Indices of the k nearest gallery entries by Euclidean distance,
/// ascending, ties broken by gallery index. Exhaustive linear scan: at this
/// scale exactness beats an index. `exclude` drops one entry (the query's
/// own) from consideration. Throws KTooLarge when k is 0 or exceeds the
/// usable gallery size.
std::vector<std::size_t> knn(const Gallery& gallery, const Embedding& query,
                             std::size_t k,
                             std::optional<std::size_t> exclude = std::nullopt);

/// Id-keyed wrapper over knn: excludes by sample id, returns ids.
std::vector<std::string> knn_ids(const Gallery& gallery, const Embedding& query,
                                 std::size_t k,
                                 const std::optional<std::string>& exclude_id);

/// Recall@k at one hierarchy level: the fraction of queries whose k nearest
/// neighbors contain at least one entry sharing the query's depth-`level`
/// ancestor. When queries and gallery are the same list (same ids, same
/// order) each query's own entry is excluded, since both sides being the
/// test set would otherwise make R@1 trivially perfect.
std::vector<double> recall_at_k(const Taxonomy& t, const Gallery& queries,
                                const Gallery& gallery,
                                const std::vector<std::size_t>& ks, int level);

/// Recall per (level, k) cell; levels are taxonomy depths of the matching
/// ancestor.
struct RecallReport {
    std::vector<int> levels;
    std::vector<std::size_t> ks;
    Matrix values;  // levels x ks

    double at(int level, std::size_t k) const;
};

RecallReport evaluate_recall(const Taxonomy& t, const Gallery& queries,
                             const Gallery& gallery,
                             const std::vector<std::size_t>& ks,
                             const std::vector<int>& levels);

/// Mean tree dissimilarity between each query's leaf and the leaf of its
/// nearest wrong-class neighbor. Lower values mean retrieval mistakes stay
/// semantically close. Queries with no wrong-class entry available are
/// skipped; returns 0 when nothing counts.
double mean_top1_mismatch_dissimilarity(const Taxonomy& t,
                                        const Gallery& queries,
                                        const Gallery& gallery);

}  // namespace svt
