#pragma once

// Chosen-plaintext recovery of the sample permutation: direct matching,
// matching after averaging K repeated observations, and exhaustive search.

#include "permcipher.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace ofdmsec {

struct AttackConfig {
    std::size_t repeats = 1;  // K
    double snr_db = 0.0;
    double match_tolerance = 1e-9;
    bool fresh_perm_per_block = false;

    void validate() const
    {
        if (repeats < 1) throw ShapeError("attack needs K >= 1");
        if (match_tolerance < 0.0) throw ShapeError("match tolerance must be >= 0");
    }
};

struct MatchResult {
    Permutation estimate;
    bool ambiguous = false;  // some position had two candidates within tolerance
};

// Greedy one-to-one assignment: positions in ascending order of their best
// distance each take the nearest still-unused source index.
inline MatchResult match_noiseless(std::span<const Complex> known, std::span<const Complex> observed,
                                   double match_tolerance = 1e-9)
{
    const std::size_t n = known.size();
    if (observed.size() != n) throw ShapeError("known and observed blocks differ in length");
    if (n == 0) throw ShapeError("empty block");

    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    bool ambiguous = false;
    for (std::size_t pos = 0; pos < n; ++pos) {
        double first = std::numeric_limits<double>::infinity();
        double second = first;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(observed[pos] - known[k]);
            if (d < first) {
                second = first;
                first = d;
            } else if (d < second) {
                second = d;
            }
        }
        best[pos] = first;
        if (n > 1 && second - first <= match_tolerance) ambiguous = true;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a] < best[b]; });

    std::vector<std::size_t> map(n);
    std::vector<bool> used(n, false);
    for (std::size_t pos : order) {
        std::size_t pick = n;
        double pick_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (used[k]) continue;
            const double d = std::abs(observed[pos] - known[k]);
            if (d < pick_d) {
                pick_d = d;
                pick = k;
            }
        }
        used[pick] = true;
        map[pos] = pick;
    }
    return {Permutation(std::move(map)), ambiguous};
}

inline CVec average_observations(std::span<const CVec> observations)
{
    if (observations.empty()) throw ShapeError("averaging attack needs at least one observation");
    CVec mean(observations.front().size());
    for (const auto& o : observations) {
        if (o.size() != mean.size()) throw ShapeError("observations differ in length");
        for (std::size_t i = 0; i < o.size(); ++i) mean[i] += o[i];
    }
    for (auto& v : mean) v /= static_cast<double>(observations.size());
    return mean;
}

// Assumes all observations share one permutation and averages the noise away.
inline MatchResult averaging_attack(std::span<const Complex> known, std::span<const CVec> observations,
                                    const AttackConfig& cfg)
{
    cfg.validate();
    const CVec mean = average_observations(observations);
    return match_noiseless(known, mean, cfg.match_tolerance);
}

// Running-sum form for large K without holding every observation.
class ObservationAccumulator {
public:
    explicit ObservationAccumulator(std::size_t size) : sum_(size) {}

    void add(std::span<const Complex> obs)
    {
        if (obs.size() != sum_.size()) throw ShapeError("observation length mismatch");
        for (std::size_t i = 0; i < obs.size(); ++i) sum_[i] += obs[i];
        ++count_;
    }

    std::size_t count() const { return count_; }

    CVec mean() const
    {
        CVec m(sum_);
        for (auto& v : m) v /= static_cast<double>(count_);
        return m;
    }

private:
    CVec sum_;
    std::size_t count_ = 0;
};

inline std::size_t recovered_positions(const Permutation& estimate, const Permutation& truth)
{
    if (estimate.size() != truth.size()) throw ShapeError("permutation sizes differ");
    std::size_t hits = 0;
    for (std::size_t n = 0; n < truth.size(); ++n) hits += estimate[n] == truth[n];
    return hits;
}

inline constexpr std::size_t kBruteForceMaxSize = 8;

struct BruteForceRefused : std::runtime_error {
    BruteForceRefused(std::size_t size, double bits)
        : std::runtime_error(describe(size, bits)), size(size), search_bits(bits) {}

    std::size_t size;
    double search_bits;

    static std::string describe(std::size_t size, double bits)
    {
        std::ostringstream os;
        os << "exhaustive search refused for size " << size << ": " << size << "! candidates = 2^" << bits
           << " (limit is size " << kBruteForceMaxSize << ")";
        return os.str();
    }
};

struct BruteForceResult {
    Permutation estimate;
    double residual = 0.0;
};

// argmin over all size! maps of sum_n |y_n - x_{map[n]}|^2. Candidates are
// visited in lexicographic order and replaced only on strict improvement, so
// ties resolve to the lexicographically smallest map.
inline BruteForceResult brute_force_attack(std::span<const Complex> known, std::span<const Complex> observed)
{
    const std::size_t n = known.size();
    if (observed.size() != n) throw ShapeError("known and observed blocks differ in length");
    if (n == 0) throw ShapeError("empty block");
    if (n > kBruteForceMaxSize) throw BruteForceRefused(n, keyspace_bits(n));

    std::vector<std::size_t> cand(n);
    std::iota(cand.begin(), cand.end(), std::size_t{0});
    std::vector<std::size_t> best = cand;
    double best_r = std::numeric_limits<double>::infinity();
    do {
        double r = 0.0;
        for (std::size_t i = 0; i < n && r < best_r; ++i) r += std::norm(observed[i] - known[cand[i]]);
        if (r < best_r) {
            best_r = r;
            best = cand;
        }
    } while (std::next_permutation(cand.begin(), cand.end()));
    return {Permutation(std::move(best)), best_r};
}

} // namespace ofdmsec
