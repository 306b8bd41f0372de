#include "adacomm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adacomm/errors.hpp"
#include "adacomm/preamble.hpp"

namespace adacomm {

CnnDecoder::CnnDecoder(nn::ModelParams params) : params_(std::move(params)) {
    params_.config.validate();
}

Symbol CnnDecoder::decode(const Frame& frame) {
    nn::forward(params_, frame, trace_);
    return trace_.probs[1] > trace_.probs[0] ? Symbol::One : Symbol::Zero;
}

void CnnDecoder::publish(nn::ModelParams params) {
    params.config.validate();
    params_ = std::move(params);
    ++snapshot_id_;
}

Symbol VarianceDecoder::decode(const Frame& frame) {
    return window_energy_variance(frame.samples) > threshold_ ? Symbol::One
                                                              : Symbol::Zero;
}

double calibrate_variance_threshold(const LabeledDataset& dataset) {
    if (!dataset.has_both_classes())
        throw SingleClassDatasetError(
            "calibrate_variance_threshold: both classes required");

    std::vector<double> vars[2];
    for (const LabeledFrame& entry : dataset.entries())
        vars[symbol_bit(entry.label)].push_back(
            window_energy_variance(entry.frame.samples));

    double median[2];
    for (int c = 0; c < 2; ++c) {
        auto& v = vars[c];
        std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
        median[c] = std::max(v[mid], 1e-12);
    }
    // Geometric midpoint: the class clusters sit orders of magnitude apart
    // (noise-floor variance vs impact variance), and a weakly impacted window
    // must still land above the cut.
    return std::sqrt(median[0] * median[1]);
}

std::size_t DecodeResult::symbol_errors() const {
    if (symbol_truth.size() != symbols.size())
        throw LengthMismatchError("symbol_errors: truth not attached");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i)
        if (symbols[i] != symbol_truth[i]) ++errors;
    return errors;
}

std::optional<std::size_t> detect_data_sync(std::span<const Frame> frames,
                                            SymbolDecoder& decoder) {
    if (frames.size() < kSyncSymbols) return std::nullopt;

    // Each frame is decoded once; the 8-frame comparison window slides over
    // the decoded symbols.
    std::vector<Symbol> decoded(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) decoded[i] = decoder.decode(frames[i]);

    for (std::size_t start = 0; start + kSyncSymbols <= decoded.size(); ++start) {
        std::size_t matches = 0;
        for (std::size_t j = 0; j < kSyncSymbols; ++j)
            if (decoded[start + j] == kSyncWord[j]) ++matches;
        if (matches >= kSyncSymbols - 1) return start;
    }
    return std::nullopt;
}

DecodeResult decode_packet(std::span<const Frame> frames, SymbolDecoder& decoder,
                           std::span<const Symbol> truth) {
    if (frames.size() != kPacketSymbols)
        throw LengthMismatchError("decode_packet: expected " +
                                  std::to_string(kPacketSymbols) + " frames, got " +
                                  std::to_string(frames.size()));
    if (!truth.empty() && truth.size() != frames.size())
        throw LengthMismatchError("decode_packet: truth length mismatch");

    DecodeResult result;
    result.snapshot_id = decoder.snapshot_id();
    result.frames.assign(frames.begin(), frames.end());
    result.symbols.resize(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        result.symbols[i] = decoder.decode(frames[i]);

    result.packet = Packet::from_symbols(result.symbols);
    result.crc_pass = result.packet.crc_ok();
    result.symbol_truth.assign(truth.begin(), truth.end());
    return result;
}

std::size_t harvest_passive(const DecodeResult& result, LabeledDataset& passive) {
    if (!result.crc_pass) return 0;
    for (std::size_t i = 0; i < result.frames.size(); ++i)
        passive.append({result.frames[i], result.symbols[i]});
    return result.frames.size();
}

}  // namespace adacomm
