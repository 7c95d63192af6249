#include "svt/margins.hpp"

#include <string>

#include "svt/errors.hpp"
#include "svt/rng.hpp"

namespace svt {

double semantic_margin(const Taxonomy& t, const MarginConfig& cfg, NodeId u,
                       NodeId v) {
    return cfg.gamma * t.dissimilarity(u, v) + cfg.beta;
}

double mean_semantic_margin(const Taxonomy& t, const MarginConfig& cfg) {
    const auto& leaves = t.leaves();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            sum += semantic_margin(t, cfg, leaves[i], leaves[j]);
            ++count;
        }
    return count ? sum / static_cast<double>(count) : 0.0;
}

double visual_similarity(const std::vector<Embedding>& class_a,
                         const std::vector<Embedding>& class_b) {
    if (class_a.empty() || class_b.empty())
        throw EmptyClass("visual similarity of an empty class");
    double sum = 0.0;
    for (const auto& a : class_a)
        for (const auto& b : class_b) sum += euclidean_distance(a, b);
    return sum / (static_cast<double>(class_a.size()) *
                  static_cast<double>(class_b.size()));
}

double visual_similarity_capped(const std::vector<Embedding>& class_a,
                                const std::vector<Embedding>& class_b,
                                std::size_t cap, std::uint64_t seed) {
    if (cap < 1) throw std::invalid_argument("visual pair cap must be >= 1");
    if (class_a.empty() || class_b.empty())
        throw EmptyClass("visual similarity of an empty class");
    const std::size_t total = class_a.size() * class_b.size();
    if (cap >= total) return visual_similarity(class_a, class_b);

    Rng rng(seed);
    const auto chosen = rng.sample_indices(total, cap);  // sorted, distinct
    double sum = 0.0;
    for (std::uint64_t idx : chosen)
        sum += euclidean_distance(class_a[idx / class_b.size()],
                                  class_b[idx % class_b.size()]);
    return sum / static_cast<double>(cap);
}

namespace {
void check_margin_config(const MarginConfig& cfg) {
    if (cfg.gamma <= 0.0)
        throw std::invalid_argument("margin gamma must be > 0");
    if (cfg.alpha < 0.0)
        throw std::invalid_argument("margin alpha must be >= 0");
    if (cfg.visual_pair_cap && *cfg.visual_pair_cap < 1)
        throw std::invalid_argument("visual pair cap must be >= 1");
}
}  // namespace

std::size_t MarginTable::row_of(NodeId leaf) const {
    const auto it = row_.find(leaf);
    if (it == row_.end())
        throw UnknownClass("leaf node " + std::to_string(leaf) +
                           " is not in the margin table");
    return it->second;
}

bool MarginTable::has_class(NodeId leaf) const { return row_.count(leaf) > 0; }

void MarginTable::fill_visual(const Taxonomy& t, const MarginConfig& cfg,
                              int epoch,
                              const std::optional<EmbeddingsByClass>& embeddings) {
    const std::size_t n = classes_.size();
    visual_ = Matrix(n, n, 0.0);
    if (epoch <= 1) return;  // visual similarity starts at zero

    if (!embeddings)
        throw MissingEmbeddings("epoch " + std::to_string(epoch) +
                                " margin table needs embeddings");
    for (NodeId leaf : classes_) {
        const auto it = embeddings->find(leaf);
        if (it == embeddings->end() || it->second.empty())
            throw MissingEmbeddings("no embeddings for class '" +
                                    t.display_name(leaf) + "'");
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const NodeId u = classes_[i];
            const NodeId v = classes_[j];
            if (t.node(t.lcs(u, v)).height > cfg.visual_height_cutoff)
                continue;  // stays 0: visual term only near the leaves
            const auto& embs_u = embeddings->at(u);
            const auto& embs_v = embeddings->at(v);
            double s;
            if (cfg.visual_pair_cap) {
                const std::uint64_t seed = mix_seed(
                    {0x76697375616cULL, static_cast<std::uint64_t>(epoch),
                     static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
                s = visual_similarity_capped(embs_u, embs_v,
                                             *cfg.visual_pair_cap, seed);
            } else {
                s = visual_similarity(embs_u, embs_v);
            }
            visual_(i, j) = s;
            visual_(j, i) = s;
        }
    }
}

MarginTable MarginTable::build(const Taxonomy& t, const MarginConfig& cfg,
                               int epoch,
                               const std::optional<EmbeddingsByClass>& embeddings) {
    check_margin_config(cfg);
    MarginTable table;
    table.epoch_ = epoch;
    table.classes_ = t.leaves();
    for (std::size_t i = 0; i < table.classes_.size(); ++i)
        table.row_[table.classes_[i]] = i;

    const std::size_t n = table.classes_.size();
    table.semantic_ = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m =
                semantic_margin(t, cfg, table.classes_[i], table.classes_[j]);
            table.semantic_(i, j) = m;
            table.semantic_(j, i) = m;
        }

    table.fill_visual(t, cfg, epoch, embeddings);

    table.combined_ = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                table.combined_(i, j) =
                    table.semantic_(i, j) + cfg.alpha * table.visual_(i, j);
    return table;
}

MarginTable MarginTable::build_fixed(const Taxonomy& t, const MarginConfig& cfg,
                                     int epoch, double fixed_margin,
                                     const std::optional<EmbeddingsByClass>& embeddings) {
    check_margin_config(cfg);
    MarginTable table;
    table.epoch_ = epoch;
    table.classes_ = t.leaves();
    for (std::size_t i = 0; i < table.classes_.size(); ++i)
        table.row_[table.classes_[i]] = i;

    const std::size_t n = table.classes_.size();
    table.semantic_ = Matrix(n, n, 0.0);
    table.combined_ = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                table.semantic_(i, j) = fixed_margin;
                table.combined_(i, j) = fixed_margin;
            }

    table.fill_visual(t, cfg, epoch, embeddings);
    return table;
}

}  // namespace svt
