#pragma once

// Per-subcarrier channel compensation of encrypted time-domain blocks, the
// circulant noise-mixing structure of ZF equalization, and the resulting
// conditional SNR / semi-analytic BER.

#include "channel.hpp"
#include "modem.hpp"

#include <cmath>

namespace ofdmsec {

enum class EqualizerVariant { ZF, MMSE };

// Deep-fade handling for ZF. Floor is always on; discard and bias act only on
// bins whose |H_k| is below deep_fade_threshold and are off by default.
struct EqualizerKind {
    EqualizerVariant variant = EqualizerVariant::ZF;
    double zf_floor = 1e-12;
    double deep_fade_threshold = 0.0;
    bool discard_deep_fades = false;
    double deep_fade_bias = 0.0;

    static EqualizerKind zf() { return {}; }
    static EqualizerKind mmse() { return {EqualizerVariant::MMSE}; }

    void validate() const
    {
        if (!(zf_floor > 0.0)) throw ShapeError("zf_floor must be positive");
        if (deep_fade_threshold < 0.0 || deep_fade_bias < 0.0) throw ShapeError("deep-fade parameters must be >= 0");
    }
};

inline const char* to_string(EqualizerVariant v) { return v == EqualizerVariant::ZF ? "zf" : "mmse"; }

inline Complex zf_coefficient(Complex h, const EqualizerKind& kind)
{
    double mag = std::abs(h);
    if (mag < kind.deep_fade_threshold) {
        if (kind.discard_deep_fades) return {};
        if (kind.deep_fade_bias > 0.0) {
            const Complex dir = mag > 0.0 ? h / mag : Complex(1.0, 0.0);
            return 1.0 / ((mag + kind.deep_fade_bias) * dir);
        }
    }
    if (mag < kind.zf_floor) {
        const Complex dir = mag > 0.0 ? h / mag : Complex(1.0, 0.0);
        return 1.0 / (kind.zf_floor * dir);
    }
    return 1.0 / h;
}

inline CVec equalizer_weights(std::span<const Complex> h, const EqualizerKind& kind, double snr)
{
    kind.validate();
    CVec w(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (kind.variant == EqualizerVariant::ZF)
            w[k] = zf_coefficient(h[k], kind);
        else
            w[k] = std::conj(h[k]) / (std::norm(h[k]) + 1.0 / snr);
    }
    return w;
}

// s = F^H diag(W) F y; result stays in the (encrypted) time domain.
inline SampleBlock equalize_with(const SampleBlock& y, std::span<const Complex> weights)
{
    if (y.framed) throw StateError("equalize expects a block with the cyclic prefix removed");
    if (weights.size() != y.size()) throw ShapeError("frequency response length does not match block");
    SampleBlock s{y.samples, false};
    fft_inplace(s.samples);
    for (std::size_t k = 0; k < s.size(); ++k) s.samples[k] *= weights[k];
    ifft_inplace(s.samples);
    return s;
}

inline SampleBlock equalize(const SampleBlock& y, std::span<const Complex> h, const EqualizerKind& kind, double snr)
{
    return equalize_with(y, equalizer_weights(h, kind, snr));
}

// Row 0 of the circulant V = F^H diag(1/H) F: v[m] = (1/N) sum_k e^{-j2pi mk/N} / H_k.
// Row r is row 0 circularly shifted right by r.
struct NoiseMixing {
    CVec first_row;

    Complex at(std::size_t r, std::size_t c) const
    {
        const std::size_t n = first_row.size();
        return first_row[(c + n - r) % n];
    }
};

inline void require_nonsingular(std::span<const Complex> h)
{
    for (std::size_t k = 0; k < h.size(); ++k)
        if (std::abs(h[k]) == 0.0) throw SingularChannelError("H_" + std::to_string(k) + " is zero");
}

inline NoiseMixing noise_mixing_row(std::span<const Complex> h)
{
    require_nonsingular(h);
    const std::size_t n = h.size();
    NoiseMixing v{CVec(n)};
    for (std::size_t m = 0; m < n; ++m) {
        Complex acc{};
        for (std::size_t k = 0; k < n; ++k)
            acc += std::polar(1.0, -2.0 * kPi * static_cast<double>((m * k) % n) / static_cast<double>(n)) / h[k];
        v.first_row[m] = acc / static_cast<double>(n);
    }
    return v;
}

// snr / ((1/N) sum |H_k|^-2); the same on every subcarrier after de-interleaving.
inline double conditional_snr_zf(std::span<const Complex> h, double snr)
{
    require_nonsingular(h);
    double acc = 0.0;
    for (const auto& v : h) acc += 1.0 / std::norm(v);
    return snr / (acc / static_cast<double>(h.size()));
}

// Floored variant used on simulated ensembles: bins below the floor count as the floor.
inline double conditional_snr_zf(std::span<const Complex> h, double snr, const EqualizerKind& kind)
{
    double acc = 0.0;
    for (const auto& v : h) acc += std::norm(zf_coefficient(v, kind));
    return snr / (acc / static_cast<double>(h.size()));
}

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Gray square M-QAM over AWGN at symbol SNR Es/N0:
//   (4 / log2 M) (1 - 1/sqrt M) Q(sqrt(3 snr / (M - 1)))
// Exact for M = 4 (reduces to Q(sqrt(snr))), nearest-neighbour approximation otherwise.
inline double qam_ber_awgn(double snr, unsigned m)
{
    const double k = std::log2(static_cast<double>(m));
    const double ber = (4.0 / k) * (1.0 - 1.0 / std::sqrt(static_cast<double>(m))) *
                       q_function(std::sqrt(3.0 * snr / (static_cast<double>(m) - 1.0)));
    return std::min(ber, 0.5);
}

// Averages the closed-form BER at SNR_|H over an ensemble of frequency responses.
inline double semi_analytic_ber(std::span<const CVec> ensemble, double snr, const QamConstellation& c,
                                const EqualizerKind& kind = EqualizerKind::zf())
{
    if (ensemble.empty()) throw ShapeError("semi_analytic_ber needs a nonempty ensemble");
    double acc = 0.0;
    for (const auto& h : ensemble) acc += qam_ber_awgn(conditional_snr_zf(h, snr, kind), c.order());
    return acc / static_cast<double>(ensemble.size());
}

} // namespace ofdmsec
