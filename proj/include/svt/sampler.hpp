#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "svt/margins.hpp"
#include "svt/taxonomy.hpp"

namespace svt {

struct SamplerConfig {
    int s_prime = 2;   // seed classes per batch
    int m_prime = 2;   // classes per group, seed included
    int t_prime = 4;   // samples per class
    std::uint64_t seed = 0;
};

/// One planned mini-batch: S' groups of M' classes with t' samples each,
/// flattened group-major into sample_ids (indices into the dataset).
struct BatchPlan {
    struct Group {
        NodeId seed_class;
        std::vector<NodeId> members;  // length M', seed first
    };
    std::vector<Group> groups;
    std::vector<std::size_t> sample_ids;  // length S' * M' * t'

    bool operator==(const BatchPlan& other) const;
};

/// Map from leaf class to the dataset indices of its samples.
using ClassIndex = std::map<NodeId, std::vector<std::size_t>>;

/// Draws a batch: S' seed classes uniformly without replacement, each
/// grouped with its M'-1 nearest classes by ascending visual similarity
/// (ties by node id); epoch-1 tables carry no visual signal yet, so
/// neighbors are drawn uniformly instead. Within a class, t' samples are
/// drawn with replacement only when the class is smaller than t'.
/// Deterministic in (cfg.seed, epoch, step).
BatchPlan draw_batch(const ClassIndex& index, const MarginTable& table,
                     const SamplerConfig& cfg, int epoch, int step);

}  // namespace svt
