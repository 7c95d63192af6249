#include "svt/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "svt/errors.hpp"

namespace svt {

EmbeddingsByClass embed_all(const EmbedderParams& params,
                            const Dataset& dataset) {
    EmbeddingsByClass by_class;
    for (const Sample& s : dataset.samples) {
        try {
            by_class[s.leaf].push_back(embed(params, s.features));
        } catch (const ZeroPreNormVector& e) {
            throw ZeroPreNormVector(std::string(e.what()) + " (sample '" +
                                    s.id + "')");
        }
    }
    return by_class;
}

double resolve_fixed_margin(const Taxonomy& t, const TrainConfig& cfg) {
    if (cfg.fixed_margin) return *cfg.fixed_margin;
    return mean_semantic_margin(t, cfg.margin);
}

void format_step_line(std::ostream& out, const StepRecord& rec) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%d\t%d\t%.17g\t%.17g\t%.17g\t%zu\n",
                  rec.epoch, rec.step, rec.loss.total, rec.loss.positive_term,
                  rec.loss.negative_term, rec.loss.active_negatives);
    out << buf;
}

TrainState train(const Dataset& dataset, const Taxonomy& taxonomy,
                 const TrainConfig& cfg, const TrainHooks& hooks) {
    if (dataset.samples.empty())
        throw std::invalid_argument("cannot train on an empty dataset");
    // lr == 0 is a legal degenerate run (training becomes a no-op)
    if (cfg.lr < 0.0) throw std::invalid_argument("learning rate must be >= 0");
    if (cfg.epochs < 1 || cfg.steps_per_epoch < 1)
        throw std::invalid_argument("epochs and steps_per_epoch must be >= 1");

    std::vector<int> dims;
    dims.push_back(static_cast<int>(dataset.feature_dim));
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(cfg.embed_dim);

    const double fixed_margin = cfg.margin_mode == MarginMode::fixed
                                    ? resolve_fixed_margin(taxonomy, cfg)
                                    : 0.0;

    auto build_table = [&](int epoch,
                           const std::optional<EmbeddingsByClass>& embs) {
        return cfg.margin_mode == MarginMode::adaptive
                   ? MarginTable::build(taxonomy, cfg.margin, epoch, embs)
                   : MarginTable::build_fixed(taxonomy, cfg.margin, epoch,
                                              fixed_margin, embs);
    };

    TrainState state{init_params(dims, cfg.seed), build_table(1, std::nullopt),
                     0, 0, {}};
    GradientAccumulator acc = make_accumulator(state.params);

    if (hooks.step_log)
        *hooks.step_log << "# epoch\tstep\ttotal\tpositive\tnegative\t"
                           "active_negatives\n";

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (epoch > 1)
            state.margin_table =
                build_table(epoch, embed_all(state.params, dataset));
        state.epoch = epoch;

        for (int step = 1; step <= cfg.steps_per_epoch; ++step) {
            state.step = step;
            const BatchPlan plan = draw_batch(dataset.index, state.margin_table,
                                              cfg.sampler, epoch, step);

            std::vector<NodeId> leaves;
            std::vector<Embedding> embeddings;
            std::vector<ForwardCache> caches(plan.sample_ids.size());
            leaves.reserve(plan.sample_ids.size());
            embeddings.reserve(plan.sample_ids.size());
            for (std::size_t b = 0; b < plan.sample_ids.size(); ++b) {
                const Sample& s = dataset.samples[plan.sample_ids[b]];
                leaves.push_back(s.leaf);
                embeddings.push_back(embed(state.params, s.features, &caches[b]));
            }

            const PairSet pairs = enumerate_pairs(leaves, state.margin_table);
            auto [report, emb_grads] = loss_and_grad(pairs, embeddings);
            if (!std::isfinite(report.total))
                throw DivergedLoss("non-finite loss at epoch " +
                                   std::to_string(epoch) + " step " +
                                   std::to_string(step));

            zero(acc);
            for (std::size_t b = 0; b < plan.sample_ids.size(); ++b)
                backward(state.params, caches[b], emb_grads[b], acc);
            sgd_step(state.params, acc, cfg.lr);

            state.loss_history.push_back({epoch, step, report});
            if (hooks.step_log)
                format_step_line(*hooks.step_log, state.loss_history.back());
        }

        if (hooks.on_epoch_end) hooks.on_epoch_end(state);
    }
    return state;
}

}  // namespace svt
