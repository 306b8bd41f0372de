#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adacomm/model.hpp"
#include "adacomm/types.hpp"

namespace adacomm {

// Per-frame symbol decoder. Implementations own whatever state they need
// (a model snapshot, a threshold); decode() must be a pure function of that
// state and the frame.
class SymbolDecoder {
  public:
    virtual ~SymbolDecoder() = default;
    virtual Symbol decode(const Frame& frame) = 0;
    virtual std::string name() const = 0;
    // Identifier of the parameter snapshot in use; constant for stateless
    // decoders. Bumps exactly when new parameters are published.
    virtual std::uint64_t snapshot_id() const { return 0; }
};

// Neural decoder wrapping a ModelParams snapshot. publish() swaps the
// snapshot atomically from the pipeline's point of view: callers only
// invoke it between packets.
class CnnDecoder final : public SymbolDecoder {
  public:
    explicit CnnDecoder(nn::ModelParams params);

    Symbol decode(const Frame& frame) override;
    std::string name() const override { return "cnn"; }
    std::uint64_t snapshot_id() const override { return snapshot_id_; }

    const nn::ModelParams& params() const { return params_; }
    void publish(nn::ModelParams params);

  private:
    nn::ModelParams params_;
    nn::ForwardTrace trace_;
    std::uint64_t snapshot_id_ = 1;
};

// Fixed-threshold baseline: symbol 1 iff the frame's per-sample energy
// variance exceeds the threshold. Never retrained after calibration.
class VarianceDecoder final : public SymbolDecoder {
  public:
    explicit VarianceDecoder(double threshold) : threshold_(threshold) {}

    Symbol decode(const Frame& frame) override;
    std::string name() const override { return "variance-threshold"; }

    double threshold() const { return threshold_; }

  private:
    double threshold_;
};

// Picks a threshold separating the two classes of a labeled dataset:
// midpoint between the median window variances of class 0 and class 1.
// Throws SingleClassDatasetError if one class is absent.
double calibrate_variance_threshold(const LabeledDataset& dataset);

struct DecodeResult {
    Packet packet;
    std::vector<Frame> frames;    // the 88 windows, in symbol order
    std::vector<Symbol> symbols;  // decoded, one per frame
    bool crc_pass = false;
    std::uint64_t snapshot_id = 0;
    // Simulation-only ground truth; empty outside the simulator.
    std::vector<Symbol> symbol_truth;

    // Hamming distance between decoded and true symbols; requires truth.
    std::size_t symbol_errors() const;
};

// Decodes frames in sliding 8-frame groups, one frame per step, and returns
// the first index whose decoded symbols match the sync word in at least 7 of
// 8 positions. Absence is a normal outcome.
std::optional<std::size_t> detect_data_sync(std::span<const Frame> frames,
                                            SymbolDecoder& decoder);

// Decodes exactly kPacketSymbols frames with the decoder's current snapshot
// and reassembles the packet; crc_pass is the CRC-16 verification outcome.
// `truth` (optional) must be empty or match frames in length.
DecodeResult decode_packet(std::span<const Frame> frames, SymbolDecoder& decoder,
                           std::span<const Symbol> truth = {});

// CRC-gated self-labeling: appends every (frame, decoded symbol) pair of a
// CRC-passing packet to the passive dataset; CRC-failing packets contribute
// nothing. Returns the number of frames appended.
std::size_t harvest_passive(const DecodeResult& result, LabeledDataset& passive);

}  // namespace adacomm
