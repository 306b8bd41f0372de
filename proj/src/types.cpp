#include "adacomm/types.hpp"

#include <cmath>
#include <stdexcept>

#include "adacomm/crc16.hpp"

namespace adacomm {

double SampleVector::energy() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

void validate_frame(const Frame& frame) {
    if (frame.samples.empty()) throw std::invalid_argument("frame has no samples");
    const std::size_t d = frame.samples.front().width();
    if (d == 0) throw std::invalid_argument("frame has zero-width samples");
    std::int64_t prev = frame.t_start_us - 1;
    for (const SampleVector& s : frame.samples) {
        if (s.width() != d) throw std::invalid_argument("frame mixes sample widths");
        for (double v : s.values) {
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("sample amplitude not finite and non-negative");
        }
        if (s.t_us <= prev || s.t_us < frame.t_start_us || s.t_us >= frame.t_end_us)
            throw std::invalid_argument("sample timestamps not strictly increasing in window");
        prev = s.t_us;
    }
}

void LabeledDataset::append(LabeledFrame entry) {
    entries_.push_back(std::move(entry));
    while (entries_.size() > capacity_) entries_.pop_front();
}

std::array<std::size_t, 2> LabeledDataset::class_counts() const {
    std::array<std::size_t, 2> counts{0, 0};
    for (const LabeledFrame& e : entries_) counts[symbol_bit(e.label)]++;
    return counts;
}

bool LabeledDataset::has_both_classes() const {
    auto c = class_counts();
    return c[0] > 0 && c[1] > 0;
}

Packet Packet::make(const std::array<std::uint8_t, kPayloadBytes>& payload) {
    Packet p;
    p.payload = payload;
    p.crc = crc16_ccitt_false(payload);
    return p;
}

Packet Packet::from_symbols(std::span<const Symbol> symbols) {
    if (symbols.size() != kPacketSymbols)
        throw std::invalid_argument("packet needs exactly 88 symbols");
    Packet p;
    for (std::size_t i = 0; i < kSyncSymbols; ++i) p.sync[i] = symbols[i];
    for (std::size_t i = 0; i < kPayloadBytes * 8; ++i) {
        std::size_t byte = i / 8;
        if (i % 8 == 0) p.payload[byte] = 0;
        p.payload[byte] = static_cast<std::uint8_t>(
            (p.payload[byte] << 1) | symbol_bit(symbols[kSyncSymbols + i]));
    }
    p.crc = 0;
    for (std::size_t i = 0; i < 16; ++i)
        p.crc = static_cast<std::uint16_t>(
            (p.crc << 1) | symbol_bit(symbols[kSyncSymbols + 64 + i]));
    return p;
}

std::array<Symbol, kPacketSymbols> Packet::to_symbols() const {
    std::array<Symbol, kPacketSymbols> out{};
    for (std::size_t i = 0; i < kSyncSymbols; ++i) out[i] = sync[i];
    for (std::size_t i = 0; i < kPayloadBytes * 8; ++i)
        out[kSyncSymbols + i] =
            symbol_from_bit((payload[i / 8] >> (7 - i % 8)) & 1);
    for (std::size_t i = 0; i < 16; ++i)
        out[kSyncSymbols + 64 + i] = symbol_from_bit((crc >> (15 - i)) & 1);
    return out;
}

bool Packet::crc_ok() const { return crc16_verify(payload, crc); }

}  // namespace adacomm
