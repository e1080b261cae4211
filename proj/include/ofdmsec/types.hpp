#pragma once

#include <complex>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofdmsec {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using Bits = std::vector<std::uint8_t>;

// Wrong vector length, bad size parameter, or otherwise malformed input.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation applied to a block in the wrong framing state.
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

// A channel with a zero frequency bin where an inverse is required.
struct SingularChannelError : std::domain_error {
    using std::domain_error::domain_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline double norm2(const CVec& v)
{
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
}

} // namespace ofdmsec
