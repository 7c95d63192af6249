#pragma once

#include <cstdint>
#include <vector>

#include "svt/linalg.hpp"

namespace svt {

/// Unit-norm feature embedding, ||e||_2 == 1 within 1e-6.
using Embedding = std::vector<double>;

/// Feed-forward embedding net: rectifier on hidden layers, identity on the
/// last layer, then L2 normalization of the output.
struct EmbedderParams {
    struct Layer {
        Matrix weight;              // out_dim x in_dim
        std::vector<double> bias;   // out_dim
    };
    std::vector<Layer> layers;

    int input_dim() const { return static_cast<int>(layers.front().weight.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().weight.rows()); }
};

/// Per-parameter gradient buffers, same shapes as EmbedderParams.
struct GradientAccumulator {
    struct Layer {
        Matrix weight;
        std::vector<double> bias;
    };
    std::vector<Layer> layers;
};

/// Intermediates kept by embed() so backward() can run the exact chain rule.
struct ForwardCache {
    std::vector<std::vector<double>> activations;  // input, then each layer output (pre-norm)
    double pre_norm_length = 0.0;                  // ||z|| of the last layer output
    Embedding embedding;
};

/// Xavier-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
/// Deterministic given seed. Throws BadDims unless dims has >= 2 positive
/// entries.
EmbedderParams init_params(const std::vector<int>& layer_dims,
                           std::uint64_t seed);

/// Forward pass ending in e = z / ||z||_2. Throws ZeroPreNormVector when
/// ||z||_2 < 1e-12 (a collapsed state the caller must see, not paper over).
/// When cache is non-null it is filled for a later backward().
Embedding embed(const EmbedderParams& p, const std::vector<double>& x,
                ForwardCache* cache = nullptr);

GradientAccumulator make_accumulator(const EmbedderParams& p);
void zero(GradientAccumulator& acc);

/// Accumulates d(loss)/d(params) for one sample into acc, chaining upstream
/// (d loss / d embedding) through the normalization Jacobian
/// (I - e e^T)/||z||, the rectifier masks, and the affine layers.
void backward(const EmbedderParams& p, const ForwardCache& cache,
              const std::vector<double>& upstream, GradientAccumulator& acc);

/// p <- p - lr * g on every tensor.
void sgd_step(EmbedderParams& p, const GradientAccumulator& g, double lr);

}  // namespace svt
