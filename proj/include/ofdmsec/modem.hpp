#pragma once

// Square Gray-coded QAM and the unitary IFFT/FFT OFDM modulator with
// cyclic-prefix framing.

#include "fft.hpp"
#include "types.hpp"

#include <array>
#include <cmath>
#include <span>

namespace ofdmsec {

// Square M-QAM with per-axis Gray coding, unit average energy.
//
// A symbol carries log2(M) bits, most significant first. The first half of
// the group selects the in-phase level and the second half the quadrature
// level. On each axis a Gray word g at Gray position p = gray^{-1}(g) maps to
// amplitude (sqrt(M) - 1 - 2p) / scale, so a leading 0 bit means a positive
// amplitude. For M = 4 this is (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
//
// points()[i] is the point for the bit pattern whose MSB-first integer value is i.
class QamConstellation {
public:
    explicit QamConstellation(unsigned order) : order_(order)
    {
        if (order != 4 && order != 16 && order != 64)
            throw ShapeError("QAM order must be 4, 16 or 64, got " + std::to_string(order));
        bits_ = 0;
        while ((1u << bits_) < order) ++bits_;
        const unsigned axis_bits = bits_ / 2;
        const unsigned levels = 1u << axis_bits;
        // average energy of a square constellation with odd-integer levels: 2 (M - 1) / 3
        const double scale = std::sqrt(2.0 * (order - 1) / 3.0);
        points_.resize(order);
        for (unsigned idx = 0; idx < order; ++idx) {
            const unsigned gi = idx >> axis_bits;
            const unsigned gq = idx & (levels - 1);
            points_[idx] = Complex(axis_level(gi, levels), axis_level(gq, levels)) / scale;
        }
    }

    unsigned order() const { return order_; }
    unsigned bits_per_symbol() const { return bits_; }
    const CVec& points() const { return points_; }
    static constexpr double symbol_energy() { return 1.0; }

    const Complex& point(unsigned index) const { return points_.at(index); }

    // Nearest point by Euclidean distance; ties go to the lowest index.
    unsigned nearest(Complex s) const
    {
        unsigned best = 0;
        double best_d = std::norm(s - points_[0]);
        for (unsigned i = 1; i < order_; ++i) {
            const double d = std::norm(s - points_[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

private:
    static unsigned gray_decode(unsigned g)
    {
        unsigned p = g;
        for (unsigned shift = 1; shift < 32; shift <<= 1) p ^= p >> shift;
        return p;
    }

    static double axis_level(unsigned gray_word, unsigned levels)
    {
        const unsigned pos = gray_decode(gray_word);
        return static_cast<double>(levels) - 1.0 - 2.0 * pos;
    }

    unsigned order_;
    unsigned bits_;
    CVec points_;
};

struct OfdmConfig {
    std::size_t n = 256;     // subcarriers
    std::size_t n_cp = 16;   // cyclic prefix samples
    std::size_t depth = 1;   // interleaving depth L in OFDM symbols

    std::size_t frame_length() const { return n + n_cp; }

    void validate() const
    {
        if (!is_power_of_two(n) || n < 4) throw ShapeError("N must be a power of two >= 4");
        if (n_cp >= n) throw ShapeError("N_cp must be smaller than N");
        if (depth < 1) throw ShapeError("interleaving depth must be >= 1");
    }
};

// Time-domain samples of one OFDM symbol, with or without the cyclic prefix.
struct SampleBlock {
    CVec samples;
    bool framed = false;

    std::size_t size() const { return samples.size(); }
};

// L x N frequency-domain data symbols, row-major (row l = OFDM symbol l).
struct SymbolGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    CVec data;

    SymbolGrid() = default;
    SymbolGrid(std::size_t l, std::size_t n) : rows(l), cols(n), data(l * n) {}

    std::span<Complex> row(std::size_t l) { return {data.data() + l * cols, cols}; }
    std::span<const Complex> row(std::size_t l) const { return {data.data() + l * cols, cols}; }
};

inline CVec qam_modulate(std::span<const std::uint8_t> bits, const QamConstellation& c)
{
    const unsigned k = c.bits_per_symbol();
    if (bits.size() % k != 0)
        throw ShapeError("bit count " + std::to_string(bits.size()) + " not divisible by " + std::to_string(k));
    CVec out(bits.size() / k);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned idx = 0;
        for (unsigned b = 0; b < k; ++b) idx = (idx << 1) | (bits[s * k + b] & 1u);
        out[s] = c.point(idx);
    }
    return out;
}

inline std::vector<unsigned> qam_slice(std::span<const Complex> symbols, const QamConstellation& c)
{
    std::vector<unsigned> idx(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) idx[i] = c.nearest(symbols[i]);
    return idx;
}

inline Bits qam_demodulate(std::span<const Complex> symbols, const QamConstellation& c)
{
    const unsigned k = c.bits_per_symbol();
    Bits out(symbols.size() * k);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const unsigned idx = c.nearest(symbols[s]);
        for (unsigned b = 0; b < k; ++b) out[s * k + b] = static_cast<std::uint8_t>((idx >> (k - 1 - b)) & 1u);
    }
    return out;
}

inline SampleBlock ifft_modulate(std::span<const Complex> d)
{
    if (!is_power_of_two(d.size()))
        throw ShapeError("IFFT length must be a power of two, got " + std::to_string(d.size()));
    SampleBlock x{CVec(d.begin(), d.end()), false};
    ifft_inplace(x.samples);
    return x;
}

inline CVec fft_demodulate(const SampleBlock& y)
{
    if (y.framed) throw StateError("fft_demodulate needs a block with the cyclic prefix removed");
    if (!is_power_of_two(y.size()))
        throw ShapeError("FFT length must be a power of two, got " + std::to_string(y.size()));
    return fft(y.samples);
}

inline SampleBlock add_cp(const SampleBlock& x, std::size_t n_cp)
{
    if (x.framed) throw StateError("block already carries a cyclic prefix");
    const std::size_t n = x.size();
    if (n_cp >= n && n > 0) throw ShapeError("cyclic prefix must be shorter than the block");
    SampleBlock out;
    out.framed = true;
    out.samples.reserve(n + n_cp);
    out.samples.insert(out.samples.end(), x.samples.end() - static_cast<std::ptrdiff_t>(n_cp), x.samples.end());
    out.samples.insert(out.samples.end(), x.samples.begin(), x.samples.end());
    return out;
}

inline SampleBlock remove_cp(const SampleBlock& framed, std::size_t n_cp)
{
    if (!framed.framed) throw StateError("block carries no cyclic prefix");
    if (framed.size() < n_cp) throw ShapeError("framed block shorter than the cyclic prefix");
    return SampleBlock{CVec(framed.samples.begin() + static_cast<std::ptrdiff_t>(n_cp), framed.samples.end()), false};
}

} // namespace ofdmsec
