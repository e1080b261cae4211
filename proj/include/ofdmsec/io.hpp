#pragma once

// File formats: raw IQ samples, key files, key = value configs, channel
// profiles and permutation test vectors.

#include "channel.hpp"
#include "permcipher.hpp"

#include <bit>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ofdmsec {

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string strip_comment(const std::string& line)
{
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_all(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace detail

// IQ: little-endian float32 pairs (I then Q), no header.
inline CVec decode_iq(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() % 8 != 0)
        throw IoError("IQ data truncated: " + std::to_string(bytes.size()) + " bytes is not a whole number of samples");
    CVec out(bytes.size() / 8);
    auto f32 = [&](std::size_t off) {
        std::uint32_t u = 0;
        for (int i = 0; i < 4; ++i) u |= static_cast<std::uint32_t>(bytes[off + i]) << (8 * i);
        return static_cast<double>(std::bit_cast<float>(u));
    };
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {f32(8 * i), f32(8 * i + 4)};
    return out;
}

inline std::vector<std::uint8_t> encode_iq(std::span<const Complex> samples)
{
    std::vector<std::uint8_t> bytes(samples.size() * 8);
    auto put = [&](std::size_t off, double v) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int i = 0; i < 4; ++i) bytes[off + i] = static_cast<std::uint8_t>(u >> (8 * i));
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
        put(8 * i, samples[i].real());
        put(8 * i + 4, samples[i].imag());
    }
    return bytes;
}

inline CVec read_iq(const std::filesystem::path& path) { return decode_iq(detail::read_all(path)); }

inline void write_iq(const std::filesystem::path& path, std::span<const Complex> samples)
{
    detail::write_all(path, encode_iq(samples));
}

inline std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

inline std::vector<std::uint8_t> from_hex(std::string_view hex)
{
    std::string clean;
    for (char c : hex)
        if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
    if (clean.size() % 2 != 0) throw IoError("hex string has odd length");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw IoError(std::string("invalid hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out(clean.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nib(clean[2 * i]) << 4 | nib(clean[2 * i + 1]));
    return out;
}

// Key file: hex text (whitespace ignored) when the whole file is hex digits
// and whitespace with at least 32 digits, raw bytes otherwise.
inline SecretKey parse_key_bytes(std::span<const std::uint8_t> bytes)
{
    std::size_t digits = 0;
    bool hex = !bytes.empty();
    for (auto b : bytes) {
        if (std::isxdigit(b))
            ++digits;
        else if (!std::isspace(b)) {
            hex = false;
            break;
        }
    }
    std::vector<std::uint8_t> raw;
    if (hex && digits >= 2 * SecretKey::kMinBytes && digits % 2 == 0)
        raw = from_hex(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    else
        raw.assign(bytes.begin(), bytes.end());
    if (raw.size() < SecretKey::kMinBytes)
        throw IoError("key must be at least 16 bytes, file holds " + std::to_string(raw.size()));
    return SecretKey(std::move(raw));
}

inline SecretKey read_key_file(const std::filesystem::path& path) { return parse_key_bytes(detail::read_all(path)); }

// `key = value` lines, '#' starts a comment.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>")
    {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string body = detail::trim(detail::strip_comment(line));
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw IoError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = detail::trim(body.substr(0, eq));
            if (key.empty()) throw IoError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = detail::trim(body.substr(eq + 1));
        }
        return cfg;
    }

    static KeyValueConfig load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config " + path.string());
        return parse(in, path.string());
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
    std::map<std::string, std::string> values_;
};

// Profile file: `delay power` per line, '#' comments.
inline ChannelProfile parse_profile(std::istream& in, const std::string& origin = "<profile>")
{
    ChannelProfile p;
    p.delays.clear();
    p.mean_powers.clear();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = detail::trim(detail::strip_comment(line));
        if (body.empty()) continue;
        std::istringstream ls(body);
        long long delay = -1;
        double power = 0.0;
        std::string extra;
        if (!(ls >> delay >> power) || (ls >> extra) || delay < 0)
            throw IoError(origin + ":" + std::to_string(lineno) + ": expected 'delay power'");
        p.delays.push_back(static_cast<std::size_t>(delay));
        p.mean_powers.push_back(power);
    }
    try {
        p.validate();
    } catch (const ShapeError& e) {
        throw IoError(origin + ": " + e.what());
    }
    return p;
}

inline ChannelProfile load_profile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile " + path.string());
    return parse_profile(in, path.string());
}

// Permutation vector line: `size, key-hex, block_index, i0 i1 ...` where the
// map is comma-separated after the third field.
struct PermutationVector {
    std::size_t size = 0;
    std::vector<std::uint8_t> key;
    std::uint64_t block_index = 0;
    std::vector<std::size_t> map;
};

inline std::vector<PermutationVector> parse_permutation_vectors(std::istream& in)
{
    std::vector<PermutationVector> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string body = detail::trim(detail::strip_comment(line));
        if (body.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(body);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(detail::trim(f));
        if (fields.size() < 4) throw IoError("permutation vector line has fewer than 4 fields");
        PermutationVector v;
        v.size = std::stoul(fields[0]);
        v.key = from_hex(fields[1]);
        v.block_index = std::stoull(fields[2]);
        for (std::size_t i = 3; i < fields.size(); ++i) v.map.push_back(std::stoul(fields[i]));
        if (v.map.size() != v.size) throw IoError("permutation vector map length does not match size");
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace ofdmsec
