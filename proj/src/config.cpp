#include "svt/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svt/errors.hpp"

namespace svt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("key '" + key + "': cannot parse integer '" + value +
                         "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("key '" + key + "': cannot parse number '" + value +
                         "'");
    }
}

}  // namespace

void apply_config_entry(TrainConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "gamma") cfg.margin.gamma = parse_real(key, value);
    else if (key == "beta") cfg.margin.beta = parse_real(key, value);
    else if (key == "alpha") cfg.margin.alpha = parse_real(key, value);
    else if (key == "visual_height_cutoff")
        cfg.margin.visual_height_cutoff = static_cast<int>(parse_int(key, value));
    else if (key == "visual_pair_cap")
        cfg.margin.visual_pair_cap =
            static_cast<std::size_t>(parse_int(key, value));
    else if (key == "s_prime") cfg.sampler.s_prime = static_cast<int>(parse_int(key, value));
    else if (key == "m_prime") cfg.sampler.m_prime = static_cast<int>(parse_int(key, value));
    else if (key == "t_prime") cfg.sampler.t_prime = static_cast<int>(parse_int(key, value));
    else if (key == "lr") cfg.lr = parse_real(key, value);
    else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
    else if (key == "steps_per_epoch")
        cfg.steps_per_epoch = static_cast<int>(parse_int(key, value));
    else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        cfg.sampler.seed = cfg.seed;
    } else if (key == "checkpoint_every")
        cfg.checkpoint_every = static_cast<int>(parse_int(key, value));
    else if (key == "hidden_dims") {
        cfg.hidden_dims.clear();
        for (const auto& part : split_commas(value))
            if (!part.empty())
                cfg.hidden_dims.push_back(static_cast<int>(parse_int(key, part)));
    } else if (key == "embed_dim")
        cfg.embed_dim = static_cast<int>(parse_int(key, value));
    else if (key == "margin_mode") {
        if (value == "adaptive") cfg.margin_mode = MarginMode::adaptive;
        else if (value == "fixed") cfg.margin_mode = MarginMode::fixed;
        else
            throw ParseError("key 'margin_mode': expected adaptive or fixed, "
                             "got '" + value + "'");
    } else if (key == "fixed_margin")
        cfg.fixed_margin = parse_real(key, value);
    else
        throw ParseError("unknown config key '" + key + "'");
}

TrainConfig load_train_config(const std::filesystem::path& path,
                              TrainConfig base) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected key = value");
        try {
            apply_config_entry(base, trim(line.substr(0, eq)),
                               trim(line.substr(eq + 1)));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    return base;
}

void write_train_config(std::ostream& out, const TrainConfig& cfg) {
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "gamma = " << real(cfg.margin.gamma) << '\n';
    out << "beta = " << real(cfg.margin.beta) << '\n';
    out << "alpha = " << real(cfg.margin.alpha) << '\n';
    out << "visual_height_cutoff = " << cfg.margin.visual_height_cutoff << '\n';
    if (cfg.margin.visual_pair_cap)
        out << "visual_pair_cap = " << *cfg.margin.visual_pair_cap << '\n';
    out << "s_prime = " << cfg.sampler.s_prime << '\n';
    out << "m_prime = " << cfg.sampler.m_prime << '\n';
    out << "t_prime = " << cfg.sampler.t_prime << '\n';
    out << "lr = " << real(cfg.lr) << '\n';
    out << "epochs = " << cfg.epochs << '\n';
    out << "steps_per_epoch = " << cfg.steps_per_epoch << '\n';
    out << "seed = " << cfg.seed << '\n';
    if (cfg.checkpoint_every)
        out << "checkpoint_every = " << *cfg.checkpoint_every << '\n';
    out << "hidden_dims = ";
    for (std::size_t i = 0; i < cfg.hidden_dims.size(); ++i)
        out << (i ? "," : "") << cfg.hidden_dims[i];
    out << '\n';
    out << "embed_dim = " << cfg.embed_dim << '\n';
    out << "margin_mode = "
        << (cfg.margin_mode == MarginMode::adaptive ? "adaptive" : "fixed")
        << '\n';
    if (cfg.fixed_margin)
        out << "fixed_margin = " << real(*cfg.fixed_margin) << '\n';
}

}  // namespace svt
