#include "svt/retrieval.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "svt/errors.hpp"

namespace svt {

Gallery embed_gallery(const EmbedderParams& params, const Dataset& dataset) {
    Gallery g;
    g.embeddings.reserve(dataset.samples.size());
    g.ids.reserve(dataset.samples.size());
    g.leaves.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) {
        g.embeddings.push_back(embed(params, s.features));
        g.ids.push_back(s.id);
        g.leaves.push_back(s.leaf);
    }
    return g;
}

std::vector<std::size_t> knn(const Gallery& gallery, const Embedding& query,
                             std::size_t k, std::optional<std::size_t> exclude) {
    // normalize the exclusion to a sentinel index; out of range means none
    const std::size_t excluded =
        exclude.value_or(gallery.size()) < gallery.size() ? *exclude
                                                          : gallery.size();
    const std::size_t usable =
        gallery.size() - (excluded < gallery.size() ? 1 : 0);
    if (k < 1 || k > usable)
        throw KTooLarge("k=" + std::to_string(k) + " with usable gallery of " +
                        std::to_string(usable));

    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(usable);
    for (std::size_t i = 0; i < gallery.size(); ++i) {
        if (i == excluded) continue;
        dist.emplace_back(euclidean_distance(query, gallery.embeddings[i]), i);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
    return out;
}

std::vector<std::string> knn_ids(const Gallery& gallery, const Embedding& query,
                                 std::size_t k,
                                 const std::optional<std::string>& exclude_id) {
    std::optional<std::size_t> exclude;
    if (exclude_id) {
        const auto it =
            std::find(gallery.ids.begin(), gallery.ids.end(), *exclude_id);
        if (it != gallery.ids.end())
            exclude = static_cast<std::size_t>(it - gallery.ids.begin());
    }
    std::vector<std::string> out;
    for (std::size_t i : knn(gallery, query, k, exclude))
        out.push_back(gallery.ids[i]);
    return out;
}

namespace {
bool same_sample_set(const Gallery& queries, const Gallery& gallery) {
    return queries.ids == gallery.ids;
}
}  // namespace

std::vector<double> recall_at_k(const Taxonomy& t, const Gallery& queries,
                                const Gallery& gallery,
                                const std::vector<std::size_t>& ks, int level) {
    if (ks.empty()) return {};
    const bool self_mode = same_sample_set(queries, gallery);
    const std::size_t kmax = *std::max_element(ks.begin(), ks.end());

    std::vector<std::size_t> hits(ks.size(), 0);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const NodeId want = t.ancestor_at_depth(queries.leaves[q], level);
        const auto neighbors =
            knn(gallery, queries.embeddings[q], kmax,
                self_mode ? std::optional<std::size_t>(q) : std::nullopt);
        // first rank at which the ancestor matches, if any
        std::size_t first_match = neighbors.size();
        for (std::size_t r = 0; r < neighbors.size(); ++r) {
            const NodeId leaf = gallery.leaves[neighbors[r]];
            if (t.node(leaf).depth >= level &&
                t.ancestor_at_depth(leaf, level) == want) {
                first_match = r;
                break;
            }
        }
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            if (first_match < ks[ki]) ++hits[ki];
    }

    std::vector<double> recall(ks.size());
    for (std::size_t ki = 0; ki < ks.size(); ++ki)
        recall[ki] =
            static_cast<double>(hits[ki]) / static_cast<double>(queries.size());
    return recall;
}

double RecallReport::at(int level, std::size_t k) const {
    for (std::size_t li = 0; li < levels.size(); ++li)
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            if (levels[li] == level && ks[ki] == k) return values(li, ki);
    throw BadLevel("no recall cell for level " + std::to_string(level) +
                   ", k " + std::to_string(k));
}

RecallReport evaluate_recall(const Taxonomy& t, const Gallery& queries,
                             const Gallery& gallery,
                             const std::vector<std::size_t>& ks,
                             const std::vector<int>& levels) {
    RecallReport report;
    report.levels = levels;
    report.ks = ks;
    report.values = Matrix(levels.size(), ks.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const auto row = recall_at_k(t, queries, gallery, ks, levels[li]);
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            report.values(li, ki) = row[ki];
    }
    return report;
}

double mean_top1_mismatch_dissimilarity(const Taxonomy& t,
                                        const Gallery& queries,
                                        const Gallery& gallery) {
    const bool self_mode = same_sample_set(queries, gallery);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = gallery.size();
        for (std::size_t i = 0; i < gallery.size(); ++i) {
            if (self_mode && i == q) continue;
            if (gallery.leaves[i] == queries.leaves[q]) continue;
            const double d =
                euclidean_distance(queries.embeddings[q], gallery.embeddings[i]);
            if (d < best) {
                best = d;
                best_idx = i;
            }
        }
        if (best_idx == gallery.size()) continue;  // no wrong-class entries
        sum += t.dissimilarity(queries.leaves[q], gallery.leaves[best_idx]);
        ++counted;
    }
    return counted ? sum / static_cast<double>(counted) : 0.0;
}

}  // namespace svt
