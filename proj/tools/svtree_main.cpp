// svtree: train, inspect, and evaluate hierarchical metric embeddings.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svt/checkpoint.hpp"
#include "svt/config.hpp"
#include "svt/dataset.hpp"
#include "svt/errors.hpp"
#include "svt/margins.hpp"
#include "svt/retrieval.hpp"
#include "svt/sampler.hpp"
#include "svt/trainer.hpp"

namespace fs = std::filesystem;
using namespace svt;

namespace {

std::string fmt_real(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

// Config keys exposed as override flags on train/margins/sample-batch.
const std::vector<std::pair<std::string, std::string>> kConfigFlags = {
    {"gamma", "--gamma"},
    {"beta", "--beta"},
    {"alpha", "--alpha"},
    {"visual_height_cutoff", "--h-vis"},
    {"visual_pair_cap", "--pair-cap"},
    {"s_prime", "--s-prime"},
    {"m_prime", "--m-prime"},
    {"t_prime", "--t-prime"},
    {"lr", "--lr"},
    {"epochs", "--epochs"},
    {"steps_per_epoch", "--steps-per-epoch"},
    {"seed", "--seed"},
    {"checkpoint_every", "--checkpoint-every"},
    {"hidden_dims", "--hidden-dims"},
    {"embed_dim", "--embed-dim"},
    {"margin_mode", "--margin-mode"},
    {"fixed_margin", "--fixed-margin"},
};

struct ConfigCli {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "key = value config file; flags override it");
        for (const auto& [key, flag] : kConfigFlags)
            cmd->add_option(flag, overrides[key], "override config key " + key);
    }

    TrainConfig resolve(CLI::App* cmd) const {
        TrainConfig cfg;
        if (!config_path.empty()) cfg = load_train_config(config_path, cfg);
        for (const auto& [key, flag] : kConfigFlags)
            if (cmd->count(flag)) apply_config_entry(cfg, key, overrides.at(key));
        return cfg;
    }
};

void write_margin_matrix(const fs::path& path, const Taxonomy& t,
                         const MarginTable& table, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << "# epoch " << table.epoch() << '\n';
    for (NodeId leaf : table.classes()) out << '\t' << t.display_name(leaf);
    out << '\n';
    for (std::size_t i = 0; i < table.classes().size(); ++i) {
        out << t.display_name(table.classes()[i]);
        for (std::size_t j = 0; j < table.classes().size(); ++j)
            out << '\t' << fmt_real(m(i, j));
        out << '\n';
    }
}

MarginTable table_for_epoch(const Dataset& dataset, const Taxonomy& taxonomy,
                            const TrainConfig& cfg, int epoch,
                            const std::string& checkpoint_path) {
    std::optional<EmbeddingsByClass> embs;
    if (epoch > 1) {
        if (checkpoint_path.empty())
            throw MissingEmbeddings(
                "epoch > 1 needs --checkpoint to embed the dataset");
        const Checkpoint ck = load_checkpoint(checkpoint_path);
        embs = embed_all(ck.params, dataset);
    }
    if (cfg.margin_mode == MarginMode::fixed)
        return MarginTable::build_fixed(taxonomy, cfg.margin, epoch,
                                        resolve_fixed_margin(taxonomy, cfg),
                                        embs);
    return MarginTable::build(taxonomy, cfg.margin, epoch, embs);
}

int cmd_synth(const std::string& branching, int samples_per_leaf,
              int feature_dim, const std::string& level_scales, double noise,
              std::uint64_t seed, const std::string& out_path) {
    SyntheticSpec spec;
    spec.branching = parse_int_list(branching);
    spec.samples_per_leaf = samples_per_leaf;
    spec.feature_dim = feature_dim;
    spec.level_scales = parse_real_list(level_scales);
    spec.noise_scale = noise;
    spec.seed = seed;

    const auto records = generate_synthetic(spec);
    write_dataset(out_path, static_cast<std::size_t>(feature_dim), records);
    std::cout << "wrote " << records.size() << " samples to " << out_path
              << '\n';
    return 0;
}

int cmd_tree_stats(const std::string& data_path) {
    const auto [dataset, taxonomy] = load_dataset(data_path);
    std::cout << "samples: " << dataset.samples.size() << '\n';
    std::cout << "tree height: " << taxonomy.tree_height() << '\n';
    std::cout << "nodes: " << taxonomy.node_count() << '\n';
    std::cout << "leaves: " << taxonomy.leaves().size() << '\n';
    std::map<int, std::size_t> per_depth;
    for (NodeId id = 0; id < taxonomy.node_count(); ++id)
        ++per_depth[taxonomy.node(id).depth];
    for (const auto& [depth, count] : per_depth)
        std::cout << "depth " << depth << ": " << count << " node"
                  << (count == 1 ? "" : "s") << '\n';
    return 0;
}

int cmd_train(CLI::App* cmd, const ConfigCli& cc, const std::string& data_path,
              const std::string& out_dir) {
    const TrainConfig cfg = cc.resolve(cmd);
    const auto [dataset, taxonomy] = load_dataset(data_path);

    fs::create_directories(out_dir);
    std::ofstream log(fs::path(out_dir) / "train-log.txt");
    if (!log) throw ParseError("cannot write train log in '" + out_dir + "'");

    {
        std::ofstream cfg_out(fs::path(out_dir) / "config-used.txt");
        write_train_config(cfg_out, cfg);
    }

    TrainHooks hooks;
    hooks.step_log = &log;
    hooks.on_epoch_end = [&](const TrainState& state) {
        if (!cfg.checkpoint_every || state.epoch % *cfg.checkpoint_every != 0)
            return;
        save_checkpoint(fs::path(out_dir) / ("checkpoint-epoch-" +
                                             std::to_string(state.epoch) +
                                             ".bin"),
                        {cfg.seed, state.params});
    };

    const TrainState state = train(dataset, taxonomy, cfg, hooks);
    save_checkpoint(fs::path(out_dir) / "checkpoint-final.bin",
                    {cfg.seed, state.params});

    const auto& last = state.loss_history.back();
    std::cout << "trained " << cfg.epochs << " epochs x "
              << cfg.steps_per_epoch << " steps on "
              << dataset.samples.size() << " samples\n";
    std::cout << "final step loss " << fmt_real(last.loss.total) << " ("
              << last.loss.active_negatives << " active negatives)\n";
    std::cout << "checkpoint: "
              << (fs::path(out_dir) / "checkpoint-final.bin").string() << '\n';
    return 0;
}

int cmd_eval(const std::string& data_path, const std::string& checkpoint_path,
             const std::string& ks_arg, const std::string& levels_arg,
             const std::string& out_path, const std::string& topk_path) {
    const auto [dataset, taxonomy] = load_dataset(data_path);
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const Gallery gallery = embed_gallery(ck.params, dataset);

    std::vector<std::size_t> ks;
    for (int k : parse_int_list(ks_arg)) ks.push_back(static_cast<std::size_t>(k));

    std::vector<int> levels;
    if (!levels_arg.empty()) {
        levels = parse_int_list(levels_arg);
    } else {
        int min_leaf_depth = taxonomy.tree_height();
        for (NodeId leaf : taxonomy.leaves())
            min_leaf_depth = std::min(min_leaf_depth, taxonomy.node(leaf).depth);
        for (int d = 1; d <= min_leaf_depth; ++d) levels.push_back(d);
    }

    const RecallReport report =
        evaluate_recall(taxonomy, gallery, gallery, ks, levels);

    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write '" + out_path + "'");
    out << "level";
    for (std::size_t k : ks) out << "\tR@" << k;
    out << '\n';
    for (std::size_t li = 0; li < levels.size(); ++li) {
        out << levels[li];
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            out << '\t' << fmt_real(report.values(li, ki), "%.6f");
        out << '\n';
    }

    const double mismatch =
        mean_top1_mismatch_dissimilarity(taxonomy, gallery, gallery);
    std::cout << "queries: " << gallery.size() << " (gallery = query set, "
              << "self-match excluded)\n";
    for (std::size_t li = 0; li < levels.size(); ++li) {
        std::cout << "level " << levels[li] << ":";
        for (std::size_t ki = 0; ki < ks.size(); ++ki)
            std::cout << "  R@" << ks[ki] << "="
                      << fmt_real(report.values(li, ki), "%.4f");
        std::cout << '\n';
    }
    std::cout << "mean top-1 mismatch dissimilarity: "
              << fmt_real(mismatch, "%.6f") << '\n';
    std::cout << "report: " << out_path << '\n';

    if (!topk_path.empty()) {
        const std::size_t kmax = *std::max_element(ks.begin(), ks.end());
        std::ofstream topk(topk_path);
        if (!topk) throw ParseError("cannot write '" + topk_path + "'");
        topk << "# query\ttop-" << kmax << " neighbors\n";
        for (std::size_t q = 0; q < gallery.size(); ++q) {
            topk << gallery.ids[q];
            for (std::size_t i : knn(gallery, gallery.embeddings[q], kmax, q))
                topk << '\t' << gallery.ids[i];
            topk << '\n';
        }
    }
    return 0;
}

int cmd_query(const std::string& data_path, const std::string& checkpoint_path,
              const std::string& query_id, int k) {
    const auto [dataset, taxonomy] = load_dataset(data_path);
    const Checkpoint ck = load_checkpoint(checkpoint_path);
    const Gallery gallery = embed_gallery(ck.params, dataset);

    std::size_t query_idx = gallery.size();
    for (std::size_t i = 0; i < gallery.size(); ++i)
        if (gallery.ids[i] == query_id) {
            query_idx = i;
            break;
        }
    if (query_idx == gallery.size())
        throw UnknownClass("no sample with id '" + query_id + "'");

    const auto neighbors = knn(gallery, gallery.embeddings[query_idx],
                               static_cast<std::size_t>(k), query_idx);
    std::cout << "query " << query_id << " ["
              << taxonomy.display_name(gallery.leaves[query_idx]) << "]\n";
    for (std::size_t r = 0; r < neighbors.size(); ++r) {
        const std::size_t i = neighbors[r];
        std::cout << r + 1 << '\t' << gallery.ids[i] << '\t'
                  << fmt_real(euclidean_distance(gallery.embeddings[query_idx],
                                                 gallery.embeddings[i]),
                              "%.6f")
                  << '\t' << taxonomy.display_name(gallery.leaves[i]) << '\n';
    }
    return 0;
}

int cmd_margins(CLI::App* cmd, const ConfigCli& cc, const std::string& data_path,
                int epoch, const std::string& checkpoint_path,
                const std::string& out_dir) {
    const TrainConfig cfg = cc.resolve(cmd);
    const auto [dataset, taxonomy] = load_dataset(data_path);
    const MarginTable table =
        table_for_epoch(dataset, taxonomy, cfg, epoch, checkpoint_path);

    fs::create_directories(out_dir);
    write_margin_matrix(fs::path(out_dir) / "semantic.tsv", taxonomy, table,
                        table.semantic_matrix());
    write_margin_matrix(fs::path(out_dir) / "visual.tsv", taxonomy, table,
                        table.visual_matrix());
    write_margin_matrix(fs::path(out_dir) / "combined.tsv", taxonomy, table,
                        table.combined_matrix());
    std::cout << "wrote semantic/visual/combined margin tables for epoch "
              << epoch << " to " << out_dir << '\n';
    return 0;
}

int cmd_sample_batch(CLI::App* cmd, const ConfigCli& cc,
                     const std::string& data_path, int epoch, int step,
                     const std::string& checkpoint_path) {
    const TrainConfig cfg = cc.resolve(cmd);
    const auto [dataset, taxonomy] = load_dataset(data_path);
    const MarginTable table =
        table_for_epoch(dataset, taxonomy, cfg, epoch, checkpoint_path);

    const BatchPlan plan =
        draw_batch(dataset.index, table, cfg.sampler, epoch, step);
    const std::size_t per_group =
        static_cast<std::size_t>(cfg.sampler.m_prime) *
        static_cast<std::size_t>(cfg.sampler.t_prime);
    for (std::size_t g = 0; g < plan.groups.size(); ++g) {
        const auto& group = plan.groups[g];
        std::cout << "group " << g << " seed "
                  << taxonomy.display_name(group.seed_class) << " | classes";
        for (NodeId member : group.members)
            std::cout << ' ' << taxonomy.display_name(member);
        std::cout << " | samples";
        for (std::size_t s = 0; s < per_group; ++s)
            std::cout << ' '
                      << dataset.samples[plan.sample_ids[g * per_group + s]].id;
        std::cout << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"svtree: hierarchical metric embeddings with tree-adaptive "
                 "margins"};
    app.require_subcommand(1);
    std::function<int()> action;

    // synth
    {
        auto* cmd = app.add_subcommand(
            "synth", "generate a hierarchical Gaussian dataset file");
        auto branching = std::make_shared<std::string>("3,4");
        auto samples = std::make_shared<int>(20);
        auto dim = std::make_shared<int>(16);
        auto scales = std::make_shared<std::string>("8,2");
        auto noise = std::make_shared<double>(0.5);
        auto seed = std::make_shared<std::uint64_t>(0);
        auto out = std::make_shared<std::string>();
        cmd->add_option("--branching", *branching, "children per level, e.g. 3,4");
        cmd->add_option("--samples-per-leaf", *samples, "samples per leaf class");
        cmd->add_option("--feature-dim", *dim, "feature vector dimension");
        cmd->add_option("--level-scales", *scales,
                        "per-level dispersion of cluster means");
        cmd->add_option("--noise", *noise, "within-leaf sample noise");
        cmd->add_option("--seed", *seed, "generator seed");
        cmd->add_option("--out", *out, "output dataset file")->required();
        cmd->callback([=, &action] {
            action = [=] {
                return cmd_synth(*branching, *samples, *dim, *scales, *noise,
                                 *seed, *out);
            };
        });
    }

    // tree-stats
    {
        auto* cmd = app.add_subcommand("tree-stats",
                                       "taxonomy shape of a dataset file");
        auto data = std::make_shared<std::string>();
        cmd->add_option("--data", *data, "dataset file")->required();
        cmd->callback([=, &action] { action = [=] { return cmd_tree_stats(*data); }; });
    }

    // train
    {
        auto* cmd = app.add_subcommand("train", "train an embedding model");
        auto data = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>("runs/latest");
        auto cc = std::make_shared<ConfigCli>();
        cmd->add_option("--data", *data, "training dataset file")->required();
        cmd->add_option("--out-dir", *out_dir,
                        "directory for checkpoints and logs");
        cc->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] { return cmd_train(cmd, *cc, *data, *out_dir); };
        });
    }

    // eval
    {
        auto* cmd = app.add_subcommand(
            "eval", "recall@k per hierarchy level, query set = gallery");
        auto data = std::make_shared<std::string>();
        auto ckpt = std::make_shared<std::string>();
        auto ks = std::make_shared<std::string>("1,2,4,8");
        auto levels = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("recall.tsv");
        auto topk = std::make_shared<std::string>();
        cmd->add_option("--data", *data, "dataset file")->required();
        cmd->add_option("--checkpoint", *ckpt, "model checkpoint")->required();
        cmd->add_option("--ks", *ks, "comma list of k values");
        cmd->add_option("--levels", *levels,
                        "comma list of tree depths (default: 1..leaf depth)");
        cmd->add_option("--out", *out, "report file");
        cmd->add_option("--dump-topk", *topk,
                        "also write each query's ranked neighbor ids");
        cmd->callback([=, &action] {
            action = [=] {
                return cmd_eval(*data, *ckpt, *ks, *levels, *out, *topk);
            };
        });
    }

    // query
    {
        auto* cmd = app.add_subcommand("query",
                                       "ranked neighbors of one sample");
        auto data = std::make_shared<std::string>();
        auto ckpt = std::make_shared<std::string>();
        auto id = std::make_shared<std::string>();
        auto k = std::make_shared<int>(5);
        cmd->add_option("--data", *data, "gallery dataset file")->required();
        cmd->add_option("--checkpoint", *ckpt, "model checkpoint")->required();
        cmd->add_option("--query-id", *id, "sample id to query")->required();
        cmd->add_option("--k", *k, "neighbors to list");
        cmd->callback([=, &action] {
            action = [=] { return cmd_query(*data, *ckpt, *id, *k); };
        });
    }

    // margins
    {
        auto* cmd = app.add_subcommand(
            "margins", "dump semantic/visual/combined margin tables");
        auto data = std::make_shared<std::string>();
        auto epoch = std::make_shared<int>(1);
        auto ckpt = std::make_shared<std::string>();
        auto out_dir = std::make_shared<std::string>("margins-out");
        auto cc = std::make_shared<ConfigCli>();
        cmd->add_option("--data", *data, "dataset file")->required();
        cmd->add_option("--epoch", *epoch, "margin epoch (1 = semantic only)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--checkpoint", *ckpt,
                        "model checkpoint (needed for epoch > 1)");
        cmd->add_option("--out-dir", *out_dir, "output directory");
        cc->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] {
                return cmd_margins(cmd, *cc, *data, *epoch, *ckpt, *out_dir);
            };
        });
    }

    // sample-batch
    {
        auto* cmd = app.add_subcommand("sample-batch",
                                       "print one planned mini-batch");
        auto data = std::make_shared<std::string>();
        auto epoch = std::make_shared<int>(1);
        auto step = std::make_shared<int>(1);
        auto ckpt = std::make_shared<std::string>();
        auto cc = std::make_shared<ConfigCli>();
        cmd->add_option("--data", *data, "dataset file")->required();
        cmd->add_option("--epoch", *epoch, "epoch the batch belongs to")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--step", *step, "step within the epoch")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--checkpoint", *ckpt,
                        "model checkpoint (needed for epoch > 1)");
        cc->attach(cmd);
        cmd->callback([=, &action] {
            action = [=] {
                return cmd_sample_batch(cmd, *cc, *data, *epoch, *step, *ckpt);
            };
        });
    }

    try {
        app.parse(argc, argv);
        return action ? action() : 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "InvalidArgument: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
