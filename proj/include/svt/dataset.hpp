#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "svt/sampler.hpp"
#include "svt/taxonomy.hpp"

namespace svt {

/// One dataset record as stored on disk: a unique id, the full root-first
/// label path, and a fixed-dimension feature vector.
struct RawRecord {
    std::string id;
    LabelPath labels;
    std::vector<double> features;
};

struct Sample {
    std::string id;
    LabelPath labels;
    std::vector<double> features;
    NodeId leaf = kNoNode;  // resolved against the dataset's taxonomy
};

struct Dataset {
    std::size_t feature_dim = 0;
    std::vector<Sample> samples;
    ClassIndex index;  // leaf class -> sample positions, in file order
};

/// Builds the taxonomy from the records' label paths and links every sample
/// to its leaf. Throws DimMismatch (naming the first offender) and
/// DuplicateId.
std::pair<Dataset, Taxonomy> make_dataset(std::size_t feature_dim,
                                          std::vector<RawRecord> records);

/// File format: line-delimited JSON. The first line is a header object
/// fixing the feature dimension, e.g. {"feature_dim": 16}; every following
/// line is a record {"id": ..., "labels": [...], "features": [...]}.
std::pair<Dataset, Taxonomy> load_dataset(const std::filesystem::path& path);

void write_dataset(const std::filesystem::path& path, std::size_t feature_dim,
                   const std::vector<RawRecord>& records);

/// Hierarchical Gaussian generator: a complete tree per `branching`, each
/// node's mean offset from its parent by level_scales[level] * N(0, I),
/// leaf samples jittered by noise_scale. Visual closeness then tracks
/// semantic closeness, which is the signal hierarchy-aware margins need;
/// picking level_scales that increase toward the leaves inverts it for
/// negative controls.
struct SyntheticSpec {
    std::vector<int> branching;          // children per level, root-first
    int samples_per_leaf = 10;
    int feature_dim = 8;
    std::vector<double> level_scales;    // same length as branching
    double noise_scale = 0.1;
    std::uint64_t seed = 0;
};

std::vector<RawRecord> generate_synthetic(const SyntheticSpec& spec);

}  // namespace svt
