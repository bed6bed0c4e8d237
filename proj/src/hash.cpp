#include "blockclust/hash.hpp"

#include "blockclust/errors.hpp"

#include <openssl/evp.h>

#include <cstring>

namespace blockclust {

namespace {

// Keccak-f[1600] permutation, little-endian lane encoding.
constexpr int kKeccakRounds = 24;

constexpr std::uint64_t kRoundConstants[kKeccakRounds] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr unsigned kRotation[24] = {1,  3,  6,  10, 15, 21, 28, 36,
                                    45, 55, 2,  14, 27, 41, 56, 8,
                                    25, 43, 62, 18, 39, 61, 20, 44};

constexpr unsigned kPiLane[24] = {10, 7,  11, 17, 18, 3,  5,  16,
                                  8,  21, 24, 4,  15, 23, 19, 13,
                                  12, 2,  20, 14, 22, 9,  6,  1};

inline std::uint64_t rotl64(std::uint64_t x, unsigned n) {
    return (x << n) | (x >> (64 - n));
}

void keccak_f1600(std::uint64_t state[25]) {
    for (int round = 0; round < kKeccakRounds; ++round) {
        // Theta
        std::uint64_t bc[5];
        for (int i = 0; i < 5; ++i)
            bc[i] = state[i] ^ state[i + 5] ^ state[i + 10] ^ state[i + 15] ^ state[i + 20];
        for (int i = 0; i < 5; ++i) {
            std::uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) state[j + i] ^= t;
        }
        // Rho + Pi
        std::uint64_t t = state[1];
        for (int i = 0; i < 24; ++i) {
            unsigned j = kPiLane[i];
            std::uint64_t tmp = state[j];
            state[j] = rotl64(t, kRotation[i]);
            t = tmp;
        }
        // Chi
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = state[j + i];
            for (int i = 0; i < 5; ++i)
                state[j + i] = bc[i] ^ (~bc[(i + 1) % 5] & bc[(i + 2) % 5]);
        }
        // Iota
        state[0] ^= kRoundConstants[round];
    }
}

constexpr std::size_t kKeccak256Rate = 136; // 1088-bit rate

} // namespace

Digest256 keccak256(std::span<const std::uint8_t> data) {
    std::uint64_t state[25] = {0};
    std::uint8_t block[kKeccak256Rate];

    std::size_t offset = 0;
    while (data.size() - offset >= kKeccak256Rate) {
        for (std::size_t i = 0; i < kKeccak256Rate / 8; ++i) {
            std::uint64_t lane;
            std::memcpy(&lane, data.data() + offset + i * 8, 8);
            state[i] ^= lane;
        }
        keccak_f1600(state);
        offset += kKeccak256Rate;
    }

    // Final block: original Keccak pad10*1 with 0x01 domain byte.
    std::size_t rem = data.size() - offset;
    std::memset(block, 0, sizeof(block));
    if (rem > 0) std::memcpy(block, data.data() + offset, rem);
    block[rem] = 0x01;
    block[kKeccak256Rate - 1] |= 0x80;
    for (std::size_t i = 0; i < kKeccak256Rate / 8; ++i) {
        std::uint64_t lane;
        std::memcpy(&lane, block + i * 8, 8);
        state[i] ^= lane;
    }
    keccak_f1600(state);

    Digest256 out;
    std::memcpy(out.data(), state, 32);
    return out;
}

Digest256 keccak256(std::string_view text) {
    return keccak256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest256 sha256(std::span<const std::uint8_t> data) {
    Digest256 out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size()) {
        throw Error(ErrorKind::Internal, "SHA-256 digest failed");
    }
    return out;
}

Digest256 sha256(std::string_view text) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {
int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
} // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw Error(ErrorKind::BadAddress, "hex string has odd length: " + std::string(hex));
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorKind::BadAddress, "non-hex character in: " + std::string(hex));
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

} // namespace blockclust
