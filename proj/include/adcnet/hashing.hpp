#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace adcnet {

/// Lowercase hex SHA-256 digest of the bytes.
std::string sha256_hex(std::string_view bytes);

/// IEEE CRC-32 (zlib polynomial).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace adcnet
