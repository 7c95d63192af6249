#pragma once

#include <filesystem>
#include <ostream>

#include "svt/trainer.hpp"

namespace svt {

/// Reads a flat `key = value` config file into a TrainConfig. Keys mirror
/// the config field names (gamma, beta, alpha, visual_height_cutoff,
/// visual_pair_cap, s_prime, m_prime, t_prime, lr, epochs, steps_per_epoch,
/// seed, checkpoint_every, hidden_dims, embed_dim, margin_mode,
/// fixed_margin). Lists are comma-separated; '#' starts a comment. Unknown
/// keys are ParseErrors so typos surface instead of silently using
/// defaults.
TrainConfig load_train_config(const std::filesystem::path& path,
                              TrainConfig base = {});

/// Applies one key=value assignment; shared by file parsing and CLI
/// overrides. Throws ParseError on unknown key or unparsable value.
void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value);

/// Writes the fully resolved config in the same key = value format, so a
/// run's effective settings can be re-used as a config file.
void write_train_config(std::ostream& out, const TrainConfig& cfg);

}  // namespace svt
