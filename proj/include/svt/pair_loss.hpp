#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "svt/embedder.hpp"
#include "svt/margins.hpp"

namespace svt {

/// All unordered index pairs of a batch, split by label agreement.
/// Negatives carry the margin snapshot taken from the table at enumeration
/// time, so a mid-epoch table swap cannot change a batch under evaluation.
struct PairSet {
    struct Negative {
        std::size_t i, j;  // i < j
        double margin;
    };
    std::vector<std::pair<std::size_t, std::size_t>> positives;  // i < j
    std::vector<Negative> negatives;
};

struct LossReport {
    double total = 0.0;
    double positive_term = 0.0;
    double negative_term = 0.0;
    std::size_t active_negatives = 0;  // negatives with D < M
    std::size_t num_positives = 0;
    std::size_t num_negatives = 0;
};

/// Splits the batch (leaf class per position) into positives (same leaf)
/// and negatives (distinct leaves, margin from the table). Throws
/// UnknownClass for a leaf missing from the table and std::invalid_argument
/// for batches smaller than 2.
PairSet enumerate_pairs(const std::vector<NodeId>& batch_leaves,
                        const MarginTable& table);

/// Contrastive loss over the pair set: sum of positive-pair distances plus
/// hinged margin shortfalls max(0, M - D) on negatives, with D the plain
/// Euclidean distance. Returns the per-embedding gradient alongside.
/// Subgradient choices: pairs with D < 1e-9 contribute zero gradient, and
/// the hinge kink D == M takes the inactive branch.
std::pair<LossReport, std::vector<std::vector<double>>> loss_and_grad(
    const PairSet& pairs, const std::vector<Embedding>& embeddings);

}  // namespace svt
