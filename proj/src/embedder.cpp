#include "svt/embedder.hpp"

#include <cmath>
#include <string>

#include "svt/errors.hpp"
#include "svt/rng.hpp"

namespace svt {

EmbedderParams init_params(const std::vector<int>& layer_dims,
                           std::uint64_t seed) {
    if (layer_dims.size() < 2)
        throw BadDims("need at least input and output dims, got " +
                      std::to_string(layer_dims.size()));
    for (int d : layer_dims)
        if (d <= 0) throw BadDims("non-positive layer dim " + std::to_string(d));

    Rng rng(seed);
    EmbedderParams p;
    for (std::size_t l = 1; l < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l - 1];
        const int fan_out = layer_dims[l];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        EmbedderParams::Layer layer;
        layer.weight = Matrix(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c)
                layer.weight(r, c) = rng.uniform(-bound, bound);
        layer.bias.assign(fan_out, 0.0);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

Embedding embed(const EmbedderParams& p, const std::vector<double>& x,
                ForwardCache* cache) {
    if (static_cast<int>(x.size()) != p.input_dim())
        throw ShapeMismatch("input dim " + std::to_string(x.size()) +
                            " vs expected " + std::to_string(p.input_dim()));

    std::vector<std::vector<double>> acts;
    acts.reserve(p.layers.size() + 1);
    acts.push_back(x);

    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const auto& layer = p.layers[l];
        const auto& in = acts.back();
        std::vector<double> out(layer.weight.rows());
        for (std::size_t r = 0; r < layer.weight.rows(); ++r) {
            double s = layer.bias[r];
            for (std::size_t c = 0; c < layer.weight.cols(); ++c)
                s += layer.weight(r, c) * in[c];
            out[r] = s;
        }
        const bool hidden = l + 1 < p.layers.size();
        if (hidden)
            for (double& v : out) v = v > 0.0 ? v : 0.0;
        acts.push_back(std::move(out));
    }

    const std::vector<double>& z = acts.back();
    const double n = norm2(z);
    if (n < 1e-12)
        throw ZeroPreNormVector("pre-normalization norm " + std::to_string(n));

    Embedding e(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) e[i] = z[i] / n;

    if (cache) {
        cache->activations = std::move(acts);
        cache->pre_norm_length = n;
        cache->embedding = e;
    }
    return e;
}

GradientAccumulator make_accumulator(const EmbedderParams& p) {
    GradientAccumulator acc;
    for (const auto& layer : p.layers) {
        GradientAccumulator::Layer g;
        g.weight = Matrix(layer.weight.rows(), layer.weight.cols());
        g.bias.assign(layer.bias.size(), 0.0);
        acc.layers.push_back(std::move(g));
    }
    return acc;
}

void zero(GradientAccumulator& acc) {
    for (auto& layer : acc.layers) {
        std::fill(layer.weight.data().begin(), layer.weight.data().end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
}

void backward(const EmbedderParams& p, const ForwardCache& cache,
              const std::vector<double>& upstream, GradientAccumulator& acc) {
    if (acc.layers.size() != p.layers.size() ||
        cache.activations.size() != p.layers.size() + 1 ||
        upstream.size() != cache.embedding.size())
        throw ShapeMismatch("backward inputs do not match params/cache");

    // d/dz of z/||z|| applied to upstream g: (g - e (e.g)) / ||z||
    const Embedding& e = cache.embedding;
    const double radial = dot(e, upstream);
    std::vector<double> delta(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        delta[i] = (upstream[i] - e[i] * radial) / cache.pre_norm_length;

    for (std::size_t l = p.layers.size(); l-- > 0;) {
        const auto& layer = p.layers[l];
        const auto& in = cache.activations[l];
        const auto& out = cache.activations[l + 1];

        // rectifier mask for hidden layers; the stored activation is the
        // rectified output, so out > 0 identifies the pass-through units
        if (l + 1 < p.layers.size())
            for (std::size_t r = 0; r < delta.size(); ++r)
                if (out[r] <= 0.0) delta[r] = 0.0;

        auto& g = acc.layers[l];
        for (std::size_t r = 0; r < layer.weight.rows(); ++r) {
            g.bias[r] += delta[r];
            for (std::size_t c = 0; c < layer.weight.cols(); ++c)
                g.weight(r, c) += delta[r] * in[c];
        }

        if (l == 0) break;
        std::vector<double> prev(layer.weight.cols(), 0.0);
        for (std::size_t r = 0; r < layer.weight.rows(); ++r)
            for (std::size_t c = 0; c < layer.weight.cols(); ++c)
                prev[c] += layer.weight(r, c) * delta[r];
        delta = std::move(prev);
    }
}

void sgd_step(EmbedderParams& p, const GradientAccumulator& g, double lr) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& w = p.layers[l].weight.data();
        const auto& gw = g.layers[l].weight.data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
        auto& b = p.layers[l].bias;
        const auto& gb = g.layers[l].bias;
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
    }
}

}  // namespace svt
