#pragma once

#include <cstdint>
#include <span>

namespace adacomm {

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final XOR.
// Check value: crc16_ccitt_false("123456789") == 0x29B1.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

bool crc16_verify(std::span<const std::uint8_t> data, std::uint16_t expected);

}  // namespace adacomm
