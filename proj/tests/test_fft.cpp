#include "oracles.hpp"

#include <ofdmsec/fft.hpp>
#include <ofdmsec/rng.hpp>

#include <gtest/gtest.h>

using namespace ofdmsec;

namespace {

CVec random_vec(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    CVec v(n);
    for (auto& c : v) c = complex_gaussian(rng, 1.0);
    return v;
}

} // namespace

TEST(Fft, MatchesDirectDftBothDirections)
{
    for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u, 1024u}) {
        const CVec x = random_vec(n, n);
        EXPECT_LT(oracle::max_abs_diff(fft(x), oracle::dft(x, -1.0)), 1e-10) << "N=" << n;
        EXPECT_LT(oracle::max_abs_diff(ifft(x), oracle::dft(x, +1.0)), 1e-10) << "N=" << n;
    }
}

TEST(Fft, UnitaryAndInvertible)
{
    for (std::size_t n : {4u, 64u, 256u, 1024u}) {
        const CVec x = random_vec(n, 100 + n);
        const CVec y = fft(x);
        EXPECT_NEAR(norm2(y), norm2(x), 1e-10 * norm2(x));
        EXPECT_LT(oracle::max_abs_diff(ifft(y), x), 1e-10);
        EXPECT_LT(oracle::max_abs_diff(fft(ifft(x)), x), 1e-10);
    }
}

TEST(Fft, RejectsNonPowerOfTwo)
{
    CVec x(6);
    EXPECT_THROW(fft_inplace(x), ShapeError);
    CVec empty;
    EXPECT_THROW(fft_inplace(empty), ShapeError);
}
