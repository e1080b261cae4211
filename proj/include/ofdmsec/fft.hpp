#pragma once

// Iterative radix-2 FFT with the unitary 1/sqrt(N) scaling in both directions.
//
//   forward: X_k = N^{-1/2} sum_n x_n exp(-j 2 pi n k / N)
//   inverse: x_n = N^{-1/2} sum_k X_k exp(+j 2 pi n k / N)

#include "types.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <unordered_map>

namespace ofdmsec {

class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n)
    {
        if (!is_power_of_two(n)) throw ShapeError("FFT size must be a power of two, got " + std::to_string(n));
        log2n_ = 0;
        while ((std::size_t{1} << log2n_) < n) ++log2n_;
        rev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (unsigned b = 0; b < log2n_; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n_ - 1 - b);
            rev_[i] = r;
        }
        // twiddles computed directly, not by recurrence, to keep the error at O(eps log N)
        twiddle_.resize(n / 2 > 0 ? n / 2 : 1);
        for (std::size_t k = 0; k < n / 2; ++k)
            twiddle_[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
        scale_ = 1.0 / std::sqrt(static_cast<double>(n));
    }

    std::size_t size() const { return n_; }

    void forward(std::span<Complex> x) const { run(x, false); }
    void inverse(std::span<Complex> x) const { run(x, true); }

private:
    void run(std::span<Complex> x, bool inverse) const
    {
        if (x.size() != n_) throw ShapeError("FFT input length mismatch");
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    Complex w = twiddle_[j * stride];
                    if (inverse) w = std::conj(w);
                    const Complex t = w * x[start + j + half];
                    x[start + j + half] = x[start + j] - t;
                    x[start + j] += t;
                }
            }
        }
        for (auto& v : x) v *= scale_;
    }

    std::size_t n_;
    unsigned log2n_ = 0;
    std::vector<std::size_t> rev_;
    CVec twiddle_;
    double scale_ = 1.0;
};

// Per-thread plan cache; plans are immutable once built.
inline const FftPlan& fft_plan(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

inline void fft_inplace(std::span<Complex> x) { fft_plan(x.size()).forward(x); }
inline void ifft_inplace(std::span<Complex> x) { fft_plan(x.size()).inverse(x); }

inline CVec fft(CVec x)
{
    fft_inplace(x);
    return x;
}

inline CVec ifft(CVec x)
{
    ifft_inplace(x);
    return x;
}

} // namespace ofdmsec
