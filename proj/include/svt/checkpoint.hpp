#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "svt/embedder.hpp"

namespace svt {

/// On-disk parameter container. Little-endian binary layout:
///   bytes 0..7   magic "SVTCKPT\n"
///   u32          format version (1)
///   u64          training seed
///   u32          layer-dim count n, then n x u32 dims
///   per layer    weight rows out_dim x in_dim row-major f64, bias f64s
/// Writes are byte-deterministic: equal params and seed give equal files.
struct Checkpoint {
    std::uint64_t seed = 0;
    EmbedderParams params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// In-memory rendition of the file format; handy for byte-identity checks.
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ck);

}  // namespace svt
