#include "adacomm/crc16.hpp"

namespace adacomm {

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        crc ^= static_cast<std::uint16_t>(byte) << 8;
        for (int bit = 0; bit < 8; ++bit) {
            if (crc & 0x8000)
                crc = static_cast<std::uint16_t>((crc << 1) ^ 0x1021);
            else
                crc = static_cast<std::uint16_t>(crc << 1);
        }
    }
    return crc;
}

bool crc16_verify(std::span<const std::uint8_t> data, std::uint16_t expected) {
    return crc16_ccitt_false(data) == expected;
}

}  // namespace adacomm
