#pragma once

// Keyed permutation cipher over the time-domain samples of L OFDM symbols.

#include "keystream.hpp"
#include "modem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ofdmsec {

class SecretKey {
public:
    static constexpr std::size_t kMinBytes = 16;

    explicit SecretKey(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes))
    {
        if (bytes_.size() < kMinBytes)
            throw ShapeError("secret key must be at least 16 bytes, got " + std::to_string(bytes_.size()));
    }

    std::span<const std::uint8_t> bytes() const { return bytes_; }
    std::size_t size() const { return bytes_.size(); }

    friend bool operator==(const SecretKey&, const SecretKey&) = default;

private:
    std::vector<std::uint8_t> bytes_;
};

// map[n] is the source index of output position n.
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<std::size_t> map, std::uint64_t block_index = 0)
        : map_(std::move(map)), block_index_(block_index)
    {
        std::vector<bool> seen(map_.size(), false);
        for (auto v : map_) {
            if (v >= map_.size() || seen[v]) throw ShapeError("permutation map is not a bijection");
            seen[v] = true;
        }
    }

    static Permutation identity(std::size_t size)
    {
        std::vector<std::size_t> m(size);
        std::iota(m.begin(), m.end(), std::size_t{0});
        return Permutation(std::move(m));
    }

    std::size_t size() const { return map_.size(); }
    std::uint64_t block_index() const { return block_index_; }
    const std::vector<std::size_t>& map() const { return map_; }
    std::size_t operator[](std::size_t n) const { return map_[n]; }

    Permutation inverse() const
    {
        std::vector<std::size_t> inv(map_.size());
        for (std::size_t n = 0; n < map_.size(); ++n) inv[map_[n]] = n;
        return Permutation(std::move(inv), block_index_);
    }

    template <typename T>
    std::vector<T> apply(std::span<const T> in) const
    {
        if (in.size() != map_.size()) throw ShapeError("permutation size mismatch");
        std::vector<T> out(in.size());
        for (std::size_t n = 0; n < map_.size(); ++n) out[n] = in[map_[n]];
        return out;
    }

    template <typename T>
    std::vector<T> apply_inverse(std::span<const T> in) const
    {
        if (in.size() != map_.size()) throw ShapeError("permutation size mismatch");
        std::vector<T> out(in.size());
        for (std::size_t n = 0; n < map_.size(); ++n) out[map_[n]] = in[n];
        return out;
    }

    bool operator==(const Permutation& o) const { return map_ == o.map_; }

private:
    std::vector<std::size_t> map_;
    std::uint64_t block_index_ = 0;
};

// Fisher-Yates over 0..size-1, i descending from size-1 to 1, j uniform on
// [0, i] drawn from the keyed stream for (key, block_index).
inline Permutation derive_permutation(const SecretKey& key, std::uint64_t block_index, std::size_t size)
{
    if (size == 0) throw ShapeError("permutation size must be >= 1");
    std::vector<std::size_t> m(size);
    std::iota(m.begin(), m.end(), std::size_t{0});
    KeyStream ks(key.bytes(), block_index);
    for (std::size_t i = size - 1; i >= 1; --i) {
        const auto j = static_cast<std::size_t>(ks.uniform_below(i + 1));
        std::swap(m[i], m[j]);
    }
    return Permutation(std::move(m), block_index);
}

namespace detail {

inline CVec flatten(std::span<const SampleBlock> blocks, std::size_t expected)
{
    CVec flat;
    flat.reserve(expected);
    for (const auto& b : blocks) {
        if (b.framed) throw StateError("cipher operates on blocks without cyclic prefix");
        flat.insert(flat.end(), b.samples.begin(), b.samples.end());
    }
    if (flat.size() != expected)
        throw ShapeError("L*N = " + std::to_string(flat.size()) + " does not match permutation size " +
                         std::to_string(expected));
    return flat;
}

inline std::vector<SampleBlock> fragment(const CVec& flat, std::size_t blocks)
{
    const std::size_t n = flat.size() / blocks;
    std::vector<SampleBlock> out(blocks);
    for (std::size_t l = 0; l < blocks; ++l)
        out[l].samples.assign(flat.begin() + static_cast<std::ptrdiff_t>(l * n),
                              flat.begin() + static_cast<std::ptrdiff_t>((l + 1) * n));
    return out;
}

} // namespace detail

// Flattens the L blocks symbol-major, permutes, and splits back into L blocks of N.
inline std::vector<SampleBlock> encrypt_block(std::span<const SampleBlock> blocks, const Permutation& p)
{
    if (blocks.empty()) throw ShapeError("no blocks to encrypt");
    const CVec flat = detail::flatten(blocks, p.size());
    return detail::fragment(p.apply<Complex>(flat), blocks.size());
}

inline std::vector<SampleBlock> decrypt_block(std::span<const SampleBlock> blocks, const Permutation& p)
{
    if (blocks.empty()) throw ShapeError("no blocks to decrypt");
    const CVec flat = detail::flatten(blocks, p.size());
    return detail::fragment(p.apply_inverse<Complex>(flat), blocks.size());
}

// Transpose of the N x N sample grid: output block l holds sample l of each
// of the N buffered symbols, map[l*N + m] = m*N + l.
inline Permutation transpose_interleaver(std::size_t n)
{
    if (n == 0) throw ShapeError("transpose interleaver needs N >= 1");
    std::vector<std::size_t> m(n * n);
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t k = 0; k < n; ++k) m[l * n + k] = k * n + l;
    return Permutation(std::move(m));
}

// log2(size!) = lgamma(size + 1) / ln 2.
inline double keyspace_bits(std::size_t size)
{
    if (size == 0) throw ShapeError("keyspace_bits: size must be >= 1");
    if (size <= 20) {
        double bits = 0.0;
        for (std::size_t i = 2; i <= size; ++i) bits += std::log2(static_cast<double>(i));
        return bits;
    }
    return std::lgamma(static_cast<double>(size) + 1.0) / std::log(2.0);
}

} // namespace ofdmsec
