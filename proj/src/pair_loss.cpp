#include "svt/pair_loss.hpp"

#include <stdexcept>

#include "svt/linalg.hpp"

namespace svt {

PairSet enumerate_pairs(const std::vector<NodeId>& batch_leaves,
                        const MarginTable& table) {
    if (batch_leaves.size() < 2)
        throw std::invalid_argument("pair enumeration needs a batch of >= 2");

    PairSet pairs;
    for (std::size_t i = 0; i < batch_leaves.size(); ++i)
        for (std::size_t j = i + 1; j < batch_leaves.size(); ++j) {
            if (batch_leaves[i] == batch_leaves[j]) {
                table.row_of(batch_leaves[i]);  // UnknownClass check
                pairs.positives.emplace_back(i, j);
            } else {
                pairs.negatives.push_back(
                    {i, j, table.combined(batch_leaves[i], batch_leaves[j])});
            }
        }
    return pairs;
}

namespace {
constexpr double kDegenerateDistance = 1e-9;
}

std::pair<LossReport, std::vector<std::vector<double>>> loss_and_grad(
    const PairSet& pairs, const std::vector<Embedding>& embeddings) {
    LossReport report;
    report.num_positives = pairs.positives.size();
    report.num_negatives = pairs.negatives.size();

    std::vector<std::vector<double>> grads(
        embeddings.size(),
        std::vector<double>(embeddings.empty() ? 0 : embeddings[0].size(), 0.0));

    for (const auto& [i, j] : pairs.positives) {
        const double d = euclidean_distance(embeddings[i], embeddings[j]);
        report.positive_term += d;
        if (d < kDegenerateDistance) continue;  // subgradient 0 at the kink
        for (std::size_t k = 0; k < grads[i].size(); ++k) {
            const double g = (embeddings[i][k] - embeddings[j][k]) / d;
            grads[i][k] += g;
            grads[j][k] -= g;
        }
    }

    for (const auto& neg : pairs.negatives) {
        const double d = euclidean_distance(embeddings[neg.i], embeddings[neg.j]);
        if (d >= neg.margin) continue;  // hinge inactive (kink included)
        report.negative_term += neg.margin - d;
        ++report.active_negatives;
        if (d < kDegenerateDistance) continue;
        for (std::size_t k = 0; k < grads[neg.i].size(); ++k) {
            const double g =
                (embeddings[neg.i][k] - embeddings[neg.j][k]) / d;
            grads[neg.i][k] -= g;  // push the pair apart
            grads[neg.j][k] += g;
        }
    }

    report.total = report.positive_term + report.negative_term;
    return {report, std::move(grads)};
}

}  // namespace svt
