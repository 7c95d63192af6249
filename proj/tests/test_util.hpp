#pragma once

// Shared fixtures and independent oracles. Everything here recomputes
// answers from first principles (ancestor walks, exhaustive sorts, finite
// differences) so it can sit in judgment of the library implementations.

#include <algorithm>
#include <functional>
#include <vector>

#include "svt/embedder.hpp"
#include "svt/retrieval.hpp"
#include "svt/rng.hpp"
#include "svt/taxonomy.hpp"

namespace svtest {

using namespace svt;

// three leaf classes under two categories: {[A,a1],[A,a2],[B,b1]}
inline Taxonomy t0() {
    return Taxonomy::build({{"A", "a1"}, {"A", "a2"}, {"B", "b1"}});
}

inline NodeId leaf(const Taxonomy& t, const LabelPath& path) {
    return *t.find_leaf(path);
}

// --- random trees ------------------------------------------------------

// Random leaf label paths whose built taxonomy has at most max_nodes + 1
// nodes (the synthetic root is added by build) and height <= max_depth.
inline std::vector<LabelPath> random_tree_paths(Rng& rng,
                                                std::size_t max_nodes,
                                                int max_depth) {
    struct GenNode {
        int parent;  // -1 for top level
        int depth;   // 1-based below the synthetic root
        std::vector<int> children;
    };
    const std::size_t n = 1 + rng.below(max_nodes);
    std::vector<GenNode> nodes;
    nodes.push_back({-1, 1, {}});
    for (std::size_t i = 1; i < n; ++i) {
        // bias toward attaching under an existing node to grow depth
        int parent = -1;
        if (rng.below(5) != 0) {
            const int cand = static_cast<int>(rng.below(nodes.size()));
            if (nodes[cand].depth < max_depth) parent = cand;
        }
        GenNode node{parent, parent < 0 ? 1 : nodes[parent].depth + 1, {}};
        if (parent >= 0) nodes[parent].children.push_back(static_cast<int>(i));
        nodes.push_back(node);
    }

    std::vector<LabelPath> paths;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].children.empty()) continue;
        LabelPath path;
        for (int v = static_cast<int>(i); v >= 0; v = nodes[v].parent)
            path.push_back("n" + std::to_string(v));
        std::reverse(path.begin(), path.end());
        paths.push_back(std::move(path));
    }
    return paths;
}

// --- taxonomy oracles ---------------------------------------------------

// self..root ancestor chain
inline std::vector<NodeId> ancestor_chain(const Taxonomy& t, NodeId v) {
    std::vector<NodeId> chain{v};
    while (t.node(chain.back()).parent != kNoNode)
        chain.push_back(t.node(chain.back()).parent);
    return chain;
}

// naive ancestor-set intersection: first node of u's chain that also
// appears in v's chain is the deepest common ancestor
inline NodeId lcs_oracle(const Taxonomy& t, NodeId u, NodeId v) {
    const auto chain_v = ancestor_chain(t, v);
    for (NodeId a : ancestor_chain(t, u))
        if (std::find(chain_v.begin(), chain_v.end(), a) != chain_v.end())
            return a;
    return t.root();
}

// longest downward path, recomputed without the stored heights
inline int height_oracle(const Taxonomy& t, NodeId v) {
    int h = 0;
    for (NodeId c : t.node(v).children)
        h = std::max(h, 1 + height_oracle(t, c));
    return h;
}

inline double dissimilarity_oracle(const Taxonomy& t, NodeId u, NodeId v) {
    return static_cast<double>(height_oracle(t, lcs_oracle(t, u, v))) /
           static_cast<double>(height_oracle(t, t.root()));
}

// true when any hidden pre-activation sits within tol of the rectifier
// kink, where a finite-difference oracle stops being meaningful
inline bool near_relu_kink(const EmbedderParams& p,
                           const std::vector<double>& x, double tol) {
    std::vector<double> a = x;
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
        const auto& layer = p.layers[l];
        std::vector<double> z(layer.weight.rows());
        for (std::size_t r = 0; r < layer.weight.rows(); ++r) {
            double s = layer.bias[r];
            for (std::size_t c = 0; c < layer.weight.cols(); ++c)
                s += layer.weight(r, c) * a[c];
            z[r] = s;
            if (std::abs(s) < tol) return true;
        }
        for (double& v : z) v = v > 0.0 ? v : 0.0;
        a = std::move(z);
    }
    return false;
}

// --- parameter access for finite differences ----------------------------

inline std::vector<double*> param_scalars(EmbedderParams& p) {
    std::vector<double*> out;
    for (auto& layer : p.layers) {
        for (double& w : layer.weight.data()) out.push_back(&w);
        for (double& b : layer.bias) out.push_back(&b);
    }
    return out;
}

inline std::vector<double> gradient_scalars(const GradientAccumulator& g) {
    std::vector<double> out;
    for (const auto& layer : g.layers) {
        for (double w : layer.weight.data()) out.push_back(w);
        for (double b : layer.bias) out.push_back(b);
    }
    return out;
}

// central finite differences of a scalar function over every parameter
inline std::vector<double> fd_gradient(EmbedderParams& p,
                                       const std::function<double()>& f,
                                       double step) {
    std::vector<double> out;
    for (double* w : param_scalars(p)) {
        const double saved = *w;
        *w = saved + step;
        const double hi = f();
        *w = saved - step;
        const double lo = f();
        *w = saved;
        out.push_back((hi - lo) / (2.0 * step));
    }
    return out;
}

// relative error with an absolute floor so true zeros compare cleanly
inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

// --- retrieval oracles ---------------------------------------------------

inline std::vector<std::size_t> knn_oracle(const Gallery& g,
                                           const Embedding& query,
                                           std::size_t k,
                                           std::optional<std::size_t> exclude) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (exclude && *exclude == i) continue;
        all.emplace_back(euclidean_distance(query, g.embeddings[i]), i);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
    return out;
}

// double-loop recall: for each query, scan the whole gallery
inline double recall_oracle(const Taxonomy& t, const Gallery& queries,
                            const Gallery& gallery, std::size_t k, int level,
                            bool exclude_self) {
    std::size_t hits = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto ids =
            knn_oracle(gallery, queries.embeddings[q], k,
                       exclude_self ? std::optional<std::size_t>(q)
                                    : std::nullopt);
        const NodeId want = t.ancestor_at_depth(queries.leaves[q], level);
        for (std::size_t i : ids) {
            const NodeId leaf_i = gallery.leaves[i];
            if (t.node(leaf_i).depth >= level &&
                t.ancestor_at_depth(leaf_i, level) == want) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(queries.size());
}

inline Embedding random_unit_vector(Rng& rng, std::size_t dim) {
    Embedding e(dim);
    double norm = 0.0;
    do {
        for (double& x : e) x = rng.gaussian();
        norm = norm2(e);
    } while (norm < 1e-6);
    for (double& x : e) x /= norm;
    return e;
}

}  // namespace svtest
