#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

namespace adacomm {

// One channel measurement: linear amplitude per overlapped subcarrier.
// D == values.size() (D = 1 for RSSI traces).
struct SampleVector {
    std::vector<double> values;
    std::int64_t t_us = 0;

    std::size_t width() const { return values.size(); }

    // Scalar per-sample energy: mean amplitude across subcarriers.
    double energy() const;
};

// All samples falling in one symbol window [t_start_us, t_end_us).
// N = samples.size() varies window to window; all samples share one D.
struct Frame {
    std::vector<SampleVector> samples;
    std::int64_t t_start_us = 0;
    std::int64_t t_end_us = 0;

    std::size_t length() const { return samples.size(); }
    std::size_t width() const { return samples.empty() ? 0 : samples.front().width(); }
};

// Throws std::invalid_argument on any violated Frame invariant.
void validate_frame(const Frame& frame);

enum class Symbol : std::uint8_t { Zero = 0, One = 1 };

inline int symbol_bit(Symbol s) { return s == Symbol::One ? 1 : 0; }
inline Symbol symbol_from_bit(int b) { return b ? Symbol::One : Symbol::Zero; }

struct LabeledFrame {
    Frame frame;
    Symbol label = Symbol::Zero;
};

enum class DatasetKind : std::uint8_t { Passive, Active };

// Bounded labeled-frame store. At capacity the oldest entry is evicted
// first, which biases passive fine tuning toward the recent channel state.
class LabeledDataset {
  public:
    LabeledDataset(DatasetKind kind, std::size_t capacity)
        : kind_(kind), capacity_(capacity) {}

    void append(LabeledFrame entry);

    const std::deque<LabeledFrame>& entries() const { return entries_; }
    const LabeledFrame& operator[](std::size_t i) const { return entries_[i]; }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t capacity() const { return capacity_; }
    DatasetKind kind() const { return kind_; }

    std::array<std::size_t, 2> class_counts() const;
    bool has_both_classes() const;

  private:
    DatasetKind kind_;
    std::size_t capacity_;
    std::deque<LabeledFrame> entries_;
};

// Fixed packet format: 8 sync symbols + 64 payload bits + 16 CRC bits,
// one bit per CTC symbol, MSB-first on air.
inline constexpr std::size_t kSyncSymbols = 8;
inline constexpr std::size_t kPayloadBytes = 8;
inline constexpr std::size_t kPacketSymbols = 88;  // 8 + 64 + 16

// Data sync word 10110010, decoded by the model at the receiver.
inline constexpr std::array<Symbol, kSyncSymbols> kSyncWord = {
    Symbol::One,  Symbol::Zero, Symbol::One, Symbol::One,
    Symbol::Zero, Symbol::Zero, Symbol::One, Symbol::Zero};

struct Packet {
    std::array<Symbol, kSyncSymbols> sync = kSyncWord;
    std::array<std::uint8_t, kPayloadBytes> payload{};
    std::uint16_t crc = 0;

    // Builds a packet with the CRC computed over the payload.
    static Packet make(const std::array<std::uint8_t, kPayloadBytes>& payload);

    // Reassembles a packet from 88 decoded symbols.
    static Packet from_symbols(std::span<const Symbol> symbols);

    std::array<Symbol, kPacketSymbols> to_symbols() const;

    // True iff crc matches CRC-16/CCITT-FALSE over the payload.
    bool crc_ok() const;
};

}  // namespace adacomm
