#pragma once

// Keyed byte stream used to derive permutations.
//
// For a key K (>= 16 bytes) and block index l the stream is the
// ChaCha20-IETF (RFC 8439) keystream under
//
//     chacha_key = SHA-256(K || l as 8-byte big-endian)
//     nonce      = 12 zero bytes, block counter starting at 0
//
// Integers are drawn from consecutive 8-byte little-endian words of the
// stream. Any RFC 8439 ChaCha20 with SHA-256 reproduces it bit-exactly.

#include "types.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>

namespace ofdmsec {

inline void ensure_sodium()
{
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    });
}

class KeyStream {
public:
    KeyStream(std::span<const std::uint8_t> key, std::uint64_t block_index)
    {
        ensure_sodium();
        std::vector<std::uint8_t> seed(key.begin(), key.end());
        for (int shift = 56; shift >= 0; shift -= 8) seed.push_back(static_cast<std::uint8_t>(block_index >> shift));
        crypto_hash_sha256(key_.data(), seed.data(), seed.size());
        sodium_memzero(seed.data(), seed.size());
    }

    ~KeyStream()
    {
        sodium_memzero(key_.data(), key_.size());
        sodium_memzero(buf_.data(), buf_.size());
    }

    KeyStream(const KeyStream&) = delete;
    KeyStream& operator=(const KeyStream&) = delete;

    std::uint8_t next_byte()
    {
        if (pos_ == valid_) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64()
    {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(next_byte()) << (8 * i);
        return v;
    }

    // Uniform on [0, bound) by rejection: words >= 2^64 - (2^64 mod bound) are redrawn.
    std::uint64_t uniform_below(std::uint64_t bound)
    {
        if (bound == 0) throw ShapeError("uniform_below: zero bound");
        const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;  // inclusive
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r <= limit) return r % bound;
        }
    }

private:
    static constexpr std::size_t kChunkBlocks = 64;

    // Chunks grow from one ChaCha block to kChunkBlocks; the byte sequence
    // does not depend on chunking.
    void refill()
    {
        static const std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
        const std::size_t blocks = next_chunk_;
        next_chunk_ = std::min(kChunkBlocks, 2 * next_chunk_);
        valid_ = 64 * blocks;
        std::fill(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(valid_), std::uint8_t{0});
        crypto_stream_chacha20_ietf_xor_ic(buf_.data(), buf_.data(), valid_, nonce.data(), counter_, key_.data());
        counter_ += static_cast<std::uint32_t>(blocks);
        pos_ = 0;
    }

    std::array<std::uint8_t, crypto_hash_sha256_BYTES> key_{};
    std::array<std::uint8_t, 64 * kChunkBlocks> buf_{};
    std::size_t valid_ = 0;
    std::size_t pos_ = 0;
    std::size_t next_chunk_ = 1;
    std::uint32_t counter_ = 0;
};

} // namespace ofdmsec
