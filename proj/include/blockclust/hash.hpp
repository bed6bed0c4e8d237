#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blockclust {

using Digest256 = std::array<std::uint8_t, 32>;

// Keccak-256 with the original Keccak padding (0x01), as used by Ethereum
// for function selectors. This is NOT NIST SHA3-256 (0x06 padding).
Digest256 keccak256(std::span<const std::uint8_t> data);
Digest256 keccak256(std::string_view text);

// SHA-256 (backed by OpenSSL).
Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex); // throws BadAddress on odd/garbage input

} // namespace blockclust
