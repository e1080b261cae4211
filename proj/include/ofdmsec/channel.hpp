#pragma once

// Multipath Rayleigh and AWGN channel models.

#include "modem.hpp"
#include "rng.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace ofdmsec {

// Tap gains h_0..h_{L_h} at consecutive integer sample delays (zeros allowed).
struct ChannelRealization {
    CVec taps{Complex(1.0, 0.0)};

    std::size_t order() const { return taps.empty() ? 0 : taps.size() - 1; }

    // CP of n_cp samples fully absorbs the channel memory.
    bool fits_cp(std::size_t n_cp) const { return order() + 1 <= n_cp || order() == 0; }
};

struct ChannelProfile {
    std::vector<std::size_t> delays{0};
    std::vector<double> mean_powers{1.0};

    void validate() const
    {
        if (delays.empty() || delays.size() != mean_powers.size())
            throw ShapeError("channel profile needs matching, nonempty delay and power lists");
        if (delays.front() != 0) throw ShapeError("first profile delay must be 0");
        for (std::size_t i = 1; i < delays.size(); ++i)
            if (delays[i] <= delays[i - 1]) throw ShapeError("profile delays must be strictly increasing");
        double total = 0.0;
        for (double p : mean_powers) {
            if (!(p >= 0.0)) throw ShapeError("profile powers must be nonnegative");
            total += p;
        }
        if (total > 1.0 + 1e-6) throw ShapeError("profile powers sum above 1");
    }

    std::size_t max_delay() const { return delays.back(); }

    static ChannelProfile flat() { return {}; }

    // Five-tap moderate frequency-selective profile (powers sum to 1).
    static ChannelProfile five_tap()
    {
        return {{0, 1, 2, 6, 11}, {0.34, 0.28, 0.23, 0.11, 0.04}};
    }
};

struct NoiseSpec {
    double sigma_z2 = 1.0;

    static NoiseSpec from_snr_db(double snr_db) { return {std::pow(10.0, -snr_db / 10.0)}; }
    static NoiseSpec from_snr(double snr) { return {1.0 / snr}; }

    double snr() const { return 1.0 / sigma_z2; }
    double snr_db() const { return 10.0 * std::log10(snr()); }
};

// H_k = sum_m h_m exp(-j 2 pi m k / N).
inline CVec freq_response(std::span<const Complex> taps, std::size_t n)
{
    if (taps.size() > n) throw ShapeError("channel order must be below N");
    CVec h(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{};
        for (std::size_t m = 0; m < taps.size(); ++m) {
            if (taps[m] == Complex{}) continue;
            const auto e = static_cast<double>((m * k) % n);
            acc += taps[m] * std::polar(1.0, -2.0 * kPi * e / static_cast<double>(n));
        }
        h[k] = acc;
    }
    return h;
}

inline CVec freq_response(const ChannelRealization& ch, std::size_t n) { return freq_response(ch.taps, n); }

// Linear convolution of the whole stream with the taps; the output keeps the
// input length and samples before the stream start are zero.
inline CVec apply_channel_stream(std::span<const Complex> stream, const ChannelRealization& ch)
{
    CVec out(stream.size());
    for (std::size_t m = 0; m < ch.taps.size(); ++m) {
        const Complex h = ch.taps[m];
        if (h == Complex{}) continue;
        for (std::size_t n = m; n < stream.size(); ++n) out[n] += h * stream[n - m];
    }
    return out;
}

// Frame-by-frame helper: concatenates CP-framed blocks, convolves, splits back.
inline std::vector<SampleBlock> apply_channel_frames(std::span<const SampleBlock> frames, const ChannelRealization& ch,
                                                     std::size_t n_cp)
{
    if (!ch.fits_cp(n_cp))
        std::cerr << "warning: channel order " << ch.order() << " exceeds cyclic prefix " << n_cp
                  << ", ISI is not absorbed\n";
    CVec stream;
    for (const auto& f : frames) {
        if (!f.framed) throw StateError("stream channel expects CP-framed blocks");
        stream.insert(stream.end(), f.samples.begin(), f.samples.end());
    }
    const CVec rx = apply_channel_stream(stream, ch);
    std::vector<SampleBlock> out(frames.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        out[i].framed = true;
        out[i].samples.assign(rx.begin() + static_cast<std::ptrdiff_t>(off),
                              rx.begin() + static_cast<std::ptrdiff_t>(off + frames[i].size()));
        off += frames[i].size();
    }
    return out;
}

// Fast path: circular convolution of an unframed block, equal to the stream
// path after CP removal when the CP covers the channel.
inline SampleBlock apply_channel_circular(const SampleBlock& x, const ChannelRealization& ch)
{
    if (x.framed) throw StateError("circular channel expects an unframed block");
    const std::size_t n = x.size();
    if (ch.taps.size() > n) throw ShapeError("channel longer than block");
    SampleBlock y{CVec(n), false};
    for (std::size_t m = 0; m < ch.taps.size(); ++m) {
        const Complex h = ch.taps[m];
        if (h == Complex{}) continue;
        for (std::size_t i = 0; i < n; ++i) y.samples[i] += h * x.samples[(i + n - m) % n];
    }
    return y;
}

inline void add_awgn_inplace(std::span<Complex> stream, const NoiseSpec& noise, Rng& rng)
{
    if (!(noise.sigma_z2 > 0.0)) throw ShapeError("noise variance must be positive");
    std::normal_distribution<double> nd(0.0, std::sqrt(noise.sigma_z2 / 2.0));
    for (auto& s : stream) {
        const double re = nd(rng);
        const double im = nd(rng);
        s += Complex(re, im);
    }
}

inline CVec add_awgn(CVec stream, const NoiseSpec& noise, Rng& rng)
{
    add_awgn_inplace(stream, noise, rng);
    return stream;
}

// h_m = sqrt(p_m) g_m at each profile delay, g_m ~ CN(0, 1); zero elsewhere.
inline ChannelRealization draw_rayleigh_channel(const ChannelProfile& profile, Rng& rng)
{
    profile.validate();
    ChannelRealization ch;
    ch.taps.assign(profile.max_delay() + 1, Complex{});
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    for (std::size_t i = 0; i < profile.delays.size(); ++i) {
        const double re = nd(rng);
        const double im = nd(rng);
        if (profile.mean_powers[i] == 0.0) continue;
        ch.taps[profile.delays[i]] = std::sqrt(profile.mean_powers[i]) * Complex(re, im);
    }
    return ch;
}

// Power-weighted second central moment of the delays (samples^2).
inline double rms_delay_spread(const ChannelProfile& profile)
{
    profile.validate();
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < profile.delays.size(); ++i) {
        const double t = static_cast<double>(profile.delays[i]);
        p += profile.mean_powers[i];
        m1 += profile.mean_powers[i] * t;
        m2 += profile.mean_powers[i] * t * t;
    }
    if (p <= 0.0) throw ShapeError("profile has zero total power");
    m1 /= p;
    return m2 / p - m1 * m1;
}

} // namespace ofdmsec
