#include "svt/dataset.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "svt/errors.hpp"
#include "svt/rng.hpp"

namespace svt {

using nlohmann::json;

std::pair<Dataset, Taxonomy> make_dataset(std::size_t feature_dim,
                                          std::vector<RawRecord> records) {
    std::set<std::string> seen_ids;
    std::vector<LabelPath> paths;
    paths.reserve(records.size());
    for (const RawRecord& r : records) {
        if (!seen_ids.insert(r.id).second)
            throw DuplicateId("record id '" + r.id + "' appears twice");
        if (r.features.size() != feature_dim)
            throw DimMismatch("record '" + r.id + "' has " +
                              std::to_string(r.features.size()) +
                              " features, header says " +
                              std::to_string(feature_dim));
        paths.push_back(r.labels);
    }

    Taxonomy taxonomy = Taxonomy::build(paths);

    Dataset ds;
    ds.feature_dim = feature_dim;
    ds.samples.reserve(records.size());
    for (RawRecord& r : records) {
        Sample s;
        s.id = std::move(r.id);
        s.labels = std::move(r.labels);
        s.features = std::move(r.features);
        s.leaf = *taxonomy.find_leaf(s.labels);
        ds.index[s.leaf].push_back(ds.samples.size());
        ds.samples.push_back(std::move(s));
    }
    return {std::move(ds), std::move(taxonomy)};
}

std::pair<Dataset, Taxonomy> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open dataset file '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;

    auto parse_line = [&](const std::string& text) -> json {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded())
            throw ParseError("line " + std::to_string(line_no) +
                             ": not valid JSON");
        return j;
    };

    // header
    if (!std::getline(in, line))
        throw ParseError("empty dataset file '" + path.string() + "'");
    ++line_no;
    const json header = parse_line(line);
    if (!header.is_object() || !header.contains("feature_dim") ||
        !header["feature_dim"].is_number_unsigned())
        throw ParseError("line 1: header must be {\"feature_dim\": <n>}");
    const auto feature_dim = header["feature_dim"].get<std::size_t>();

    std::vector<RawRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line);
        if (!j.is_object() || !j.contains("id") || !j.contains("labels") ||
            !j.contains("features") || !j["id"].is_string() ||
            !j["labels"].is_array() || !j["features"].is_array())
            throw ParseError("line " + std::to_string(line_no) +
                             ": record needs string id, labels array, "
                             "features array");
        RawRecord r;
        r.id = j["id"].get<std::string>();
        for (const auto& l : j["labels"]) {
            if (!l.is_string())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": labels must be strings");
            r.labels.push_back(l.get<std::string>());
        }
        for (const auto& f : j["features"]) {
            if (!f.is_number())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": features must be numbers");
            r.features.push_back(f.get<double>());
        }
        if (r.labels.empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": empty label path");
        records.push_back(std::move(r));
    }

    return make_dataset(feature_dim, std::move(records));
}

void write_dataset(const std::filesystem::path& path, std::size_t feature_dim,
                   const std::vector<RawRecord>& records) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write dataset file '" + path.string() + "'");
    out << json{{"feature_dim", feature_dim}}.dump() << '\n';
    for (const RawRecord& r : records) {
        json j;
        j["id"] = r.id;
        j["labels"] = r.labels;
        j["features"] = r.features;
        out << j.dump() << '\n';
    }
}

namespace {

struct SynthNode {
    std::string name;
    std::vector<double> mean;
};

void expand_level(const SyntheticSpec& spec, const SynthNode& parent,
                  const LabelPath& prefix, std::size_t level, Rng& rng,
                  std::vector<RawRecord>& out) {
    const int fanout = spec.branching[level];
    for (int child = 0; child < fanout; ++child) {
        SynthNode node;
        node.name = level == 0 ? "n" + std::to_string(child)
                               : parent.name + "." + std::to_string(child);
        node.mean.resize(spec.feature_dim);
        for (int d = 0; d < spec.feature_dim; ++d)
            node.mean[d] =
                parent.mean[d] + spec.level_scales[level] * rng.gaussian();

        LabelPath path = prefix;
        path.push_back(node.name);

        if (level + 1 < spec.branching.size()) {
            expand_level(spec, node, path, level + 1, rng, out);
            continue;
        }
        for (int s = 0; s < spec.samples_per_leaf; ++s) {
            RawRecord r;
            r.id = node.name + "#" + std::to_string(s);
            r.labels = path;
            r.features.resize(spec.feature_dim);
            for (int d = 0; d < spec.feature_dim; ++d)
                r.features[d] = node.mean[d] + spec.noise_scale * rng.gaussian();
            out.push_back(std::move(r));
        }
    }
}

}  // namespace

std::vector<RawRecord> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.branching.empty() ||
        spec.level_scales.size() != spec.branching.size())
        throw std::invalid_argument(
            "branching and level_scales must be non-empty and equal length");
    for (int b : spec.branching)
        if (b < 1) throw std::invalid_argument("branching factors must be >= 1");
    for (double s : spec.level_scales)
        if (s < 0.0) throw std::invalid_argument("level scales must be >= 0");
    if (spec.noise_scale < 0.0)
        throw std::invalid_argument("noise scale must be >= 0");
    if (spec.samples_per_leaf < 1 || spec.feature_dim < 1)
        throw std::invalid_argument("samples_per_leaf and feature_dim must be >= 1");

    Rng rng(mix_seed({0x73796e7468ULL, spec.seed}));
    SynthNode root;
    root.name.clear();
    root.mean.assign(spec.feature_dim, 0.0);

    std::vector<RawRecord> records;
    expand_level(spec, root, {}, 0, rng, records);
    return records;
}

}  // namespace svt
