#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adacomm/types.hpp"

namespace adacomm::nn {

struct ModelConfig {
    std::size_t input_dims = 12;                    // D
    std::vector<std::size_t> filter_widths = {3, 4, 5};
    std::size_t filters_per_width = 64;             // K
    std::size_t classes = 2;

    std::size_t feature_count() const { return filter_widths.size() * filters_per_width; }
    std::size_t max_width() const;
    std::size_t param_count() const;
    void validate() const;

    bool operator==(const ModelConfig&) const = default;
};

// Flat 64-bit parameter vector. Layout, in order:
//   per width (in filter_widths order), per filter: H*D weights (position-major,
//   subcarrier inner) then the filter bias;
//   FC weights feature-major (f*classes + c); then `classes` biases.
// Feature index f = width_index*K + filter_index, matching pooled-vector order.
struct ModelParams {
    ModelConfig config;
    std::vector<double> values;

    std::size_t conv_offset(std::size_t width_idx, std::size_t filter) const;
    double conv_weight(std::size_t width_idx, std::size_t filter, std::size_t h,
                       std::size_t d) const;
    double conv_bias(std::size_t width_idx, std::size_t filter) const;
    std::size_t fc_weight_offset() const;
    double fc_weight(std::size_t feature, std::size_t cls) const;
    double fc_bias(std::size_t cls) const;

    bool all_finite() const;
};

// Per-forward intermediate state; buffers are reused across calls.
struct ForwardTrace {
    std::vector<std::size_t> positions;       // per width: N - H + 1
    std::vector<std::size_t> feature_offset;  // per width: start into `features`
    std::vector<double> features;             // conv pre-activations, concatenated
    std::vector<std::size_t> argmax;          // per feature map: first-max position
    std::vector<double> pooled;               // per feature map: ReLU(max pre-activation)
    std::vector<double> logits;
    std::vector<double> probs;

    double feature(std::size_t width_idx, std::size_t filter, std::size_t pos) const {
        return features[feature_offset[width_idx] + filter * positions[width_idx] + pos];
    }
};

struct TrainConfig {
    double alpha = 0.05;
    std::size_t batch_size = 32;
    std::size_t max_batches = 500;
    double target_accuracy = 0.9;
    double holdout_fraction = 0.1;
    std::uint64_t rng_seed = 1;
};

struct TrainResult {
    ModelParams params;
    double final_accuracy = 0.0;
    std::size_t batches_used = 0;
};

// Glorot uniform (s = sqrt(6/(fan_in+fan_out)); conv fan_in=H*D, fan_out=1;
// FC fan_in=F, fan_out=classes), biases zero.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Valid convolution + ReLU + 1-max pool + FC + softmax.
// Throws FrameTooShortError if frame.length() < max width.
void forward(const ModelParams& params, const Frame& frame, ForwardTrace& trace);
std::vector<double> forward_probs(const ModelParams& params, const Frame& frame);

// Mean cross-entropy over the batch; grad is resized and overwritten with the
// exact analytic gradient (gradient flows only through each map's first-max
// position, blocked where the max pre-activation is <= 0).
double loss_and_grad(const ModelParams& params, std::span<const LabeledFrame> batch,
                     std::vector<double>& grad);

// p <- p - alpha*g. Throws NonFiniteUpdateError if any parameter leaves R.
void sgd_step(ModelParams& params, std::span<const double> grad, double alpha);

// Uniform mini-batch SGD with a held-out split for the stop rule; returns the
// best-holdout snapshot. The holdout is the leading ceil(holdout_fraction*n)
// examples in dataset order, so callers control its composition (shuffle
// beforehand for a random split; keep correlated groups contiguous to keep
// them on one side). Throws SingleClassDatasetError.
TrainResult train(ModelParams params, const LabeledDataset& dataset, const TrainConfig& cfg);

// Argmax class; ties toward symbol 0.
Symbol predict(const ModelParams& params, const Frame& frame);

double evaluate_accuracy(const ModelParams& params, std::span<const LabeledFrame> examples);

}  // namespace adacomm::nn
