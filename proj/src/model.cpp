#include "adacomm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adacomm/errors.hpp"
#include "adacomm/rng.hpp"

namespace adacomm::nn {

std::size_t ModelConfig::max_width() const {
    std::size_t m = 0;
    for (auto w : filter_widths) m = std::max(m, w);
    return m;
}

std::size_t ModelConfig::param_count() const {
    std::size_t n = 0;
    for (auto w : filter_widths) n += filters_per_width * (w * input_dims + 1);
    return n + feature_count() * classes + classes;
}

void ModelConfig::validate() const {
    if (input_dims == 0) throw ConfigError("model config: D must be >= 1");
    if (filter_widths.empty()) throw ConfigError("model config: need at least one filter width");
    for (auto w : filter_widths) {
        if (w == 0) throw ConfigError("model config: filter widths must be >= 1");
    }
    if (filters_per_width == 0) throw ConfigError("model config: K must be >= 1");
    if (classes < 2) throw ConfigError("model config: need >= 2 classes");
}

std::size_t ModelParams::conv_offset(std::size_t width_idx, std::size_t filter) const {
    std::size_t off = 0;
    for (std::size_t j = 0; j < width_idx; ++j) {
        off += config.filters_per_width * (config.filter_widths[j] * config.input_dims + 1);
    }
    return off + filter * (config.filter_widths[width_idx] * config.input_dims + 1);
}

double ModelParams::conv_weight(std::size_t width_idx, std::size_t filter, std::size_t h,
                                std::size_t d) const {
    return values[conv_offset(width_idx, filter) + h * config.input_dims + d];
}

double ModelParams::conv_bias(std::size_t width_idx, std::size_t filter) const {
    return values[conv_offset(width_idx, filter) +
                  config.filter_widths[width_idx] * config.input_dims];
}

std::size_t ModelParams::fc_weight_offset() const {
    std::size_t off = 0;
    for (auto w : config.filter_widths) {
        off += config.filters_per_width * (w * config.input_dims + 1);
    }
    return off;
}

double ModelParams::fc_weight(std::size_t feature, std::size_t cls) const {
    return values[fc_weight_offset() + feature * config.classes + cls];
}

double ModelParams::fc_bias(std::size_t cls) const {
    return values[fc_weight_offset() + config.feature_count() * config.classes + cls];
}

bool ModelParams::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    ModelParams p;
    p.config = config;
    p.values.assign(config.param_count(), 0.0);

    Rng rng(seed);
    std::size_t off = 0;
    for (auto width : config.filter_widths) {
        const std::size_t fan_in = width * config.input_dims;
        const double s = std::sqrt(6.0 / static_cast<double>(fan_in + 1));
        for (std::size_t k = 0; k < config.filters_per_width; ++k) {
            for (std::size_t i = 0; i < fan_in; ++i) p.values[off++] = rng.uniform(-s, s);
            off++;  // bias stays zero
        }
    }
    const double s_fc = std::sqrt(
        6.0 / static_cast<double>(config.feature_count() + config.classes));
    for (std::size_t i = 0; i < config.feature_count() * config.classes; ++i) {
        p.values[off++] = rng.uniform(-s_fc, s_fc);
    }
    return p;  // class biases stay zero
}

void forward(const ModelParams& params, const Frame& frame, ForwardTrace& trace) {
    const auto& cfg = params.config;
    const std::size_t n = frame.length();
    const std::size_t dims = cfg.input_dims;
    if (n < cfg.max_width()) {
        throw FrameTooShortError("frame has " + std::to_string(n) + " samples, model needs >= " +
                                 std::to_string(cfg.max_width()));
    }
    if (frame.width() != dims) {
        throw LengthMismatchError("frame width " + std::to_string(frame.width()) +
                                  " != model input width " + std::to_string(dims));
    }

    const std::size_t nw = cfg.filter_widths.size();
    const std::size_t filters = cfg.filters_per_width;
    const std::size_t feats = cfg.feature_count();

    trace.positions.resize(nw);
    trace.feature_offset.resize(nw);
    std::size_t total = 0;
    for (std::size_t wi = 0; wi < nw; ++wi) {
        trace.positions[wi] = n - cfg.filter_widths[wi] + 1;
        trace.feature_offset[wi] = total;
        total += filters * trace.positions[wi];
    }
    trace.features.resize(total);
    trace.argmax.resize(feats);
    trace.pooled.resize(feats);
    trace.logits.assign(cfg.classes, 0.0);
    trace.probs.resize(cfg.classes);

    std::size_t poff = 0;
    for (std::size_t wi = 0; wi < nw; ++wi) {
        const std::size_t width = cfg.filter_widths[wi];
        const std::size_t npos = trace.positions[wi];
        for (std::size_t k = 0; k < filters; ++k) {
            const double* wptr = params.values.data() + poff;
            const double bias = wptr[width * dims];
            double* fdst = trace.features.data() + trace.feature_offset[wi] + k * npos;
            double best = -std::numeric_limits<double>::infinity();
            std::size_t best_p = 0;
            for (std::size_t p = 0; p < npos; ++p) {
                double acc = bias;
                const double* wrow = wptr;
                for (std::size_t h = 0; h < width; ++h) {
                    const double* vals = frame.samples[p + h].values.data();
                    for (std::size_t d = 0; d < dims; ++d) acc += wrow[d] * vals[d];
                    wrow += dims;
                }
                fdst[p] = acc;
                if (acc > best) {
                    best = acc;
                    best_p = p;
                }
            }
            const std::size_t f = wi * filters + k;
            trace.argmax[f] = best_p;
            trace.pooled[f] = best > 0.0 ? best : 0.0;
            poff += width * dims + 1;
        }
    }

    const std::size_t fc = poff;
    for (std::size_t c = 0; c < cfg.classes; ++c) {
        trace.logits[c] = params.values[fc + feats * cfg.classes + c];
    }
    for (std::size_t f = 0; f < feats; ++f) {
        const double pv = trace.pooled[f];
        if (pv == 0.0) continue;
        const double* wf = params.values.data() + fc + f * cfg.classes;
        for (std::size_t c = 0; c < cfg.classes; ++c) trace.logits[c] += pv * wf[c];
    }

    const double mx = *std::max_element(trace.logits.begin(), trace.logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < cfg.classes; ++c) {
        trace.probs[c] = std::exp(trace.logits[c] - mx);
        sum += trace.probs[c];
    }
    for (auto& p : trace.probs) p /= sum;
}

std::vector<double> forward_probs(const ModelParams& params, const Frame& frame) {
    thread_local ForwardTrace trace;
    forward(params, frame, trace);
    return trace.probs;
}

double loss_and_grad(const ModelParams& params, std::span<const LabeledFrame> batch,
                     std::vector<double>& grad) {
    if (batch.empty()) throw ConfigError("loss_and_grad: empty batch");
    const auto& cfg = params.config;
    grad.assign(params.values.size(), 0.0);

    const std::size_t filters = cfg.filters_per_width;
    const std::size_t feats = cfg.feature_count();
    const std::size_t dims = cfg.input_dims;
    const std::size_t fc = params.fc_weight_offset();
    const double scale = 1.0 / static_cast<double>(batch.size());

    thread_local ForwardTrace trace;
    std::vector<double> dlogit(cfg.classes);
    std::vector<double> dpooled(feats);
    double loss = 0.0;

    for (const auto& ex : batch) {
        forward(params, ex.frame, trace);
        const std::size_t label = symbol_bit(ex.label);
        loss -= scale * std::log(std::max(trace.probs[label], 1e-300));

        for (std::size_t c = 0; c < cfg.classes; ++c) {
            dlogit[c] = scale * (trace.probs[c] - (c == label ? 1.0 : 0.0));
            grad[fc + feats * cfg.classes + c] += dlogit[c];
        }
        for (std::size_t f = 0; f < feats; ++f) {
            const double pv = trace.pooled[f];
            const double* wf = params.values.data() + fc + f * cfg.classes;
            double* gf = grad.data() + fc + f * cfg.classes;
            double dp = 0.0;
            for (std::size_t c = 0; c < cfg.classes; ++c) {
                gf[c] += pv * dlogit[c];
                dp += wf[c] * dlogit[c];
            }
            dpooled[f] = dp;
        }

        std::size_t poff = 0;
        for (std::size_t wi = 0; wi < cfg.filter_widths.size(); ++wi) {
            const std::size_t width = cfg.filter_widths[wi];
            for (std::size_t k = 0; k < filters; ++k) {
                const std::size_t f = wi * filters + k;
                // ReLU gate: no gradient when the max pre-activation is <= 0.
                if (trace.pooled[f] > 0.0 && dpooled[f] != 0.0) {
                    const double g = dpooled[f];
                    const std::size_t p = trace.argmax[f];
                    double* gw = grad.data() + poff;
                    for (std::size_t h = 0; h < width; ++h) {
                        const double* vals = ex.frame.samples[p + h].values.data();
                        for (std::size_t d = 0; d < dims; ++d) gw[h * dims + d] += g * vals[d];
                    }
                    gw[width * dims] += g;
                }
                poff += width * dims + 1;
            }
        }
    }
    return loss;
}

void sgd_step(ModelParams& params, std::span<const double> grad, double alpha) {
    if (grad.size() != params.values.size()) {
        throw LengthMismatchError("sgd_step: gradient size " + std::to_string(grad.size()) +
                                  " != parameter count " + std::to_string(params.values.size()));
    }
    if (alpha < 0.0) throw ConfigError("sgd_step: alpha must be >= 0");
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        params.values[i] -= alpha * grad[i];
        if (!std::isfinite(params.values[i])) {
            throw NonFiniteUpdateError("parameter " + std::to_string(i) +
                                       " became non-finite during SGD");
        }
    }
}

double evaluate_accuracy(const ModelParams& params, std::span<const LabeledFrame> examples) {
    if (examples.empty()) throw ConfigError("evaluate_accuracy: no examples");
    std::size_t correct = 0;
    for (const auto& ex : examples) {
        if (predict(params, ex.frame) == ex.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

TrainResult train(ModelParams params, const LabeledDataset& dataset, const TrainConfig& cfg) {
    params.config.validate();
    if (cfg.alpha <= 0.0) throw ConfigError("train: alpha must be positive");
    if (cfg.batch_size == 0) throw ConfigError("train: batch_size must be positive");
    if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
        throw ConfigError("train: holdout_fraction must be in (0,1)");
    }
    if (!(cfg.target_accuracy > 0.5 && cfg.target_accuracy <= 1.0)) {
        throw ConfigError("train: target_accuracy must be in (0.5, 1]");
    }
    if (!dataset.has_both_classes()) {
        throw SingleClassDatasetError("training dataset must contain both symbol classes");
    }

    Rng rng(cfg.rng_seed);
    const std::size_t n = dataset.size();

    // The holdout is the leading ceil(fraction*n) examples in dataset order,
    // not a random subset: callers that build datasets from correlated groups
    // (e.g. permutation-augmented frames) can then keep entire groups on one
    // side of the split, so holdout accuracy measures generalization instead
    // of recall of near-duplicates.
    std::size_t holdout_n = static_cast<std::size_t>(
        std::ceil(cfg.holdout_fraction * static_cast<double>(n)));
    holdout_n = std::clamp<std::size_t>(holdout_n, 1, n - 1);

    std::vector<LabeledFrame> holdout;
    holdout.reserve(holdout_n);
    std::vector<std::size_t> train_idx;
    train_idx.reserve(n - holdout_n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < holdout_n) {
            holdout.push_back(dataset[i]);
        } else {
            train_idx.push_back(i);
        }
    }

    TrainResult best;
    best.params = params;
    best.final_accuracy = evaluate_accuracy(best.params, holdout);
    best.batches_used = 0;
    if (best.final_accuracy >= cfg.target_accuracy || cfg.max_batches == 0) return best;

    std::vector<double> grad;
    std::vector<LabeledFrame> batch;
    std::size_t batches = 0;
    for (std::size_t b = 1; b <= cfg.max_batches; ++b) {
        batch.clear();
        for (std::size_t i = 0; i < cfg.batch_size; ++i) {
            batch.push_back(dataset[train_idx[rng.uniform_index(train_idx.size())]]);
        }
        loss_and_grad(params, batch, grad);
        sgd_step(params, grad, cfg.alpha);
        batches = b;

        const double acc = evaluate_accuracy(params, holdout);
        if (acc > best.final_accuracy) {
            best.final_accuracy = acc;
            best.params = params;
        }
        if (acc >= cfg.target_accuracy) break;
    }
    best.batches_used = batches;
    return best;
}

Symbol predict(const ModelParams& params, const Frame& frame) {
    thread_local ForwardTrace trace;
    forward(params, frame, trace);
    std::size_t best = 0;
    for (std::size_t c = 1; c < trace.probs.size(); ++c) {
        if (trace.probs[c] > trace.probs[best]) best = c;
    }
    return best == 1 ? Symbol::One : Symbol::Zero;
}

}  // namespace adacomm::nn
