#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "svt/dataset.hpp"
#include "svt/embedder.hpp"
#include "svt/margins.hpp"
#include "svt/pair_loss.hpp"
#include "svt/sampler.hpp"

namespace svt {

enum class MarginMode {
    adaptive,  // per-pair margins from the tree, visually refreshed per epoch
    fixed,     // one constant margin for every negative pair (control run)
};

struct TrainConfig {
    MarginConfig margin;
    SamplerConfig sampler;
    double lr = 0.05;
    int epochs = 1;
    int steps_per_epoch = 10;
    std::uint64_t seed = 0;
    std::optional<int> checkpoint_every;  // epochs between checkpoints

    std::vector<int> hidden_dims{64};
    int embed_dim = 32;

    MarginMode margin_mode = MarginMode::adaptive;
    // Constant for fixed mode; defaults to the mean semantic margin so the
    // control sees the same overall margin mass as the adaptive run.
    std::optional<double> fixed_margin;
};

struct StepRecord {
    int epoch = 0;
    int step = 0;
    LossReport loss;
};

struct TrainState {
    EmbedderParams params;
    MarginTable margin_table;
    int epoch = 0;
    int step = 0;
    std::vector<StepRecord> loss_history;
};

struct TrainHooks {
    /// Per-step log sink: epoch, step, loss terms, active-negative count.
    std::ostream* step_log = nullptr;
    /// Runs after each epoch's steps complete, before the next margin
    /// refresh; the state's params are what the next epoch starts from.
    std::function<void(const TrainState&)> on_epoch_end;
};

/// Runs the full training loop: each epoch rebuilds the margin table from
/// the parameters as they stood at the epoch boundary (epoch 1 from zero
/// visual similarity), then draws steps_per_epoch batches and applies
/// loss -> backward -> SGD. Deterministic given the config.
/// Throws DivergedLoss the moment a step's loss is not finite.
TrainState train(const Dataset& dataset, const Taxonomy& taxonomy,
                 const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Embeds the whole dataset with the given parameters, grouped by leaf
/// class, file order preserved within each class.
EmbeddingsByClass embed_all(const EmbedderParams& params,
                            const Dataset& dataset);

/// The constant used by fixed-margin runs.
double resolve_fixed_margin(const Taxonomy& t, const TrainConfig& cfg);

void format_step_line(std::ostream& out, const StepRecord& rec);

}  // namespace svt
