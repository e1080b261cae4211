#pragma once

// Monte Carlo experiments: BER over Rayleigh multipath with optional sample
// interleaving, SER of an unkeyed receiver facing partially reordered
// samples, permutation-recovery attacks, ICI measurement and the
// semi-analytic ZF curve.

#include "attack.hpp"
#include "channel.hpp"
#include "equalizer.hpp"
#include "modem.hpp"
#include "parallel.hpp"
#include "permcipher.hpp"
#include "report.hpp"
#include "rng.hpp"

#include <bit>
#include <cmath>
#include <optional>

namespace ofdmsec {

enum class InterleaverKind { None, Keyed, Transpose };

inline const char* to_string(InterleaverKind k)
{
    switch (k) {
    case InterleaverKind::None: return "none";
    case InterleaverKind::Keyed: return "keyed";
    case InterleaverKind::Transpose: return "transpose";
    }
    return "?";
}

inline InterleaverKind parse_interleaver(const std::string& s)
{
    if (s == "none") return InterleaverKind::None;
    if (s == "keyed") return InterleaverKind::Keyed;
    if (s == "transpose") return InterleaverKind::Transpose;
    throw ShapeError("unknown interleaver '" + s + "' (none|keyed|transpose)");
}

inline EqualizerVariant parse_equalizer(const std::string& s)
{
    if (s == "zf") return EqualizerVariant::ZF;
    if (s == "mmse") return EqualizerVariant::MMSE;
    throw ShapeError("unknown equalizer '" + s + "' (zf|mmse)");
}

// Channel draws depend only on (seed, block) so every SNR point and every
// interleaver configuration run with one seed sees the same channel ensemble.
inline constexpr std::uint64_t kChannelStream = 0x6368616e6e656cULL;

inline ChannelRealization draw_block_channel(const ChannelProfile& profile, std::uint64_t seed, std::uint64_t block)
{
    Rng rng = derive_rng(seed, kChannelStream, block);
    return draw_rayleigh_channel(profile, rng);
}

inline std::vector<CVec> channel_ensemble(const ChannelProfile& profile, std::size_t n, std::uint64_t seed,
                                          std::size_t count)
{
    std::vector<CVec> out(count);
    for (std::size_t b = 0; b < count; ++b) out[b] = freq_response(draw_block_channel(profile, seed, b), n);
    return out;
}

// ---------------------------------------------------------------------------
// BER over multipath

struct BerExperimentConfig {
    std::size_t n = 256;
    unsigned order = 4;
    std::size_t n_cp = 16;
    InterleaverKind interleaver = InterleaverKind::Transpose;
    std::size_t depth = 1;          // L for the keyed interleaver
    std::size_t block_symbols = 0;  // OFDM symbols per static-channel block, 0 means N
    EqualizerKind equalizer = EqualizerKind::zf();
    std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30};
    ChannelProfile profile = ChannelProfile::five_tap();
    std::size_t min_blocks = 1;
    std::uint64_t target_errors = 200;
    std::uint64_t max_bits = 100'000'000;
    std::size_t max_blocks = 0;  // 0 means unlimited
    std::size_t batch_blocks = 8;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string label = "ber";

    std::size_t symbols_per_block() const { return block_symbols == 0 ? n : block_symbols; }

    void validate() const
    {
        OfdmConfig{n, n_cp, depth}.validate();
        QamConstellation{order};
        profile.validate();
        equalizer.validate();
        if (n_cp <= profile.max_delay()) throw ShapeError("N_cp must exceed the largest profile delay");
        if (interleaver == InterleaverKind::Transpose && symbols_per_block() != n)
            throw ShapeError("transpose interleaver needs N symbols per block");
        if (interleaver == InterleaverKind::Keyed && symbols_per_block() % depth != 0)
            throw ShapeError("block symbols must be a multiple of the interleaving depth");
        if (batch_blocks == 0) throw ShapeError("batch_blocks must be >= 1");
        if (snr_db.empty()) throw ShapeError("empty SNR grid");
    }
};

namespace detail {

inline unsigned symbol_index(std::span<const std::uint8_t> bits, unsigned k)
{
    unsigned idx = 0;
    for (unsigned b = 0; b < k; ++b) idx = (idx << 1) | bits[b];
    return idx;
}

inline void count_errors(std::span<const unsigned> tx, std::span<const Complex> rx, const QamConstellation& c,
                         ErrorCounts& acc)
{
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const unsigned got = c.nearest(rx[i]);
        acc.symbol_errors += got != tx[i];
        acc.bit_errors += static_cast<std::uint64_t>(std::popcount(got ^ tx[i]));
    }
    acc.symbols += tx.size();
    acc.bits += tx.size() * c.bits_per_symbol();
}

} // namespace detail

// One static-channel block: QAM -> IFFT -> interleave -> CP -> stream channel
// -> AWGN -> CP removal -> equalize -> de-interleave -> FFT -> hard decision.
inline ErrorCounts simulate_ber_block(const BerExperimentConfig& cfg, double snr_db, std::uint64_t point,
                                      std::uint64_t block, const Permutation* transpose = nullptr)
{
    const QamConstellation qam(cfg.order);
    const unsigned k = qam.bits_per_symbol();
    const std::size_t n = cfg.n;
    const std::size_t symbols = cfg.symbols_per_block();
    const NoiseSpec noise = NoiseSpec::from_snr_db(snr_db);

    Rng rng = derive_rng(cfg.seed, point, block);
    const ChannelRealization ch = draw_block_channel(cfg.profile, cfg.seed, block);
    const CVec h = freq_response(ch, n);
    const CVec w = equalizer_weights(h, cfg.equalizer, noise.snr());

    const Bits bits = random_bits(rng, symbols * n * k);
    std::vector<unsigned> tx(symbols * n);
    for (std::size_t i = 0; i < tx.size(); ++i) tx[i] = detail::symbol_index({bits.data() + i * k, k}, k);
    const CVec d = qam_modulate(bits, qam);

    std::vector<SampleBlock> x(symbols);
    for (std::size_t l = 0; l < symbols; ++l) x[l] = ifft_modulate({d.data() + l * n, n});

    // interleaver groups: (first symbol, symbol count, permutation)
    std::vector<Permutation> perms;
    std::size_t group = symbols;
    std::optional<Permutation> local_transpose;
    if (cfg.interleaver == InterleaverKind::Transpose) {
        if (!transpose) local_transpose = transpose_interleaver(n);
        perms.push_back(transpose ? *transpose : *local_transpose);
    } else if (cfg.interleaver == InterleaverKind::Keyed) {
        group = cfg.depth;
        std::vector<std::uint8_t> key_bytes(32);
        std::uniform_int_distribution<int> byte(0, 255);
        for (auto& b : key_bytes) b = static_cast<std::uint8_t>(byte(rng));
        const SecretKey key(std::move(key_bytes));
        for (std::size_t g = 0; g < symbols / group; ++g) perms.push_back(derive_permutation(key, g, group * n));
    }

    std::vector<SampleBlock> tx_blocks;
    if (perms.empty()) {
        tx_blocks = x;
    } else {
        tx_blocks.reserve(symbols);
        for (std::size_t g = 0; g < perms.size(); ++g) {
            auto enc = encrypt_block(std::span<const SampleBlock>(x.data() + g * group, group), perms[g]);
            for (auto& b : enc) tx_blocks.push_back(std::move(b));
        }
    }

    std::vector<SampleBlock> frames(symbols);
    for (std::size_t l = 0; l < symbols; ++l) frames[l] = add_cp(tx_blocks[l], cfg.n_cp);
    auto rx_frames = apply_channel_frames(frames, ch, cfg.n_cp);

    std::vector<SampleBlock> eq(symbols);
    for (std::size_t l = 0; l < symbols; ++l) {
        add_awgn_inplace(rx_frames[l].samples, noise, rng);
        eq[l] = equalize_with(remove_cp(rx_frames[l], cfg.n_cp), w);
    }

    std::vector<SampleBlock> plain;
    if (perms.empty()) {
        plain = std::move(eq);
    } else {
        plain.reserve(symbols);
        for (std::size_t g = 0; g < perms.size(); ++g) {
            auto dec = decrypt_block(std::span<const SampleBlock>(eq.data() + g * group, group), perms[g]);
            for (auto& b : dec) plain.push_back(std::move(b));
        }
    }

    ErrorCounts acc;
    acc.trials = 1;
    for (std::size_t l = 0; l < symbols; ++l) {
        const CVec y = fft_demodulate(plain[l]);
        detail::count_errors({tx.data() + l * n, n}, y, qam, acc);
    }
    return acc;
}

// Runs batches of blocks until bit_errors >= target_errors and at least
// min_blocks blocks were simulated, or max_bits / max_blocks is reached.
// Batches have a fixed size so the stopping point does not depend on workers.
inline ErrorCounts run_ber_point(const BerExperimentConfig& cfg, double snr_db, std::uint64_t point)
{
    std::optional<Permutation> tp;
    if (cfg.interleaver == InterleaverKind::Transpose) tp = transpose_interleaver(cfg.n);
    ErrorCounts total;
    std::uint64_t next_block = 0;
    for (;;) {
        const bool enough_errors = total.bit_errors >= cfg.target_errors && total.trials >= cfg.min_blocks;
        const bool cap_bits = total.bits >= cfg.max_bits;
        const bool cap_blocks = cfg.max_blocks != 0 && total.trials >= cfg.max_blocks;
        if (enough_errors || cap_bits || cap_blocks) break;
        std::size_t batch = cfg.batch_blocks;
        if (cfg.max_blocks != 0) batch = std::min<std::size_t>(batch, cfg.max_blocks - total.trials);
        std::vector<ErrorCounts> slots(batch);
        parallel_for(batch, cfg.workers, [&](std::size_t i) {
            slots[i] = simulate_ber_block(cfg, snr_db, point, next_block + i, tp ? &*tp : nullptr);
        });
        for (const auto& s : slots) total += s;
        next_block += batch;
    }
    return total;
}

inline TrialReport run_ber_experiment(const BerExperimentConfig& cfg)
{
    cfg.validate();
    TrialReport report;
    for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
        ReportRow row;
        row.experiment = cfg.label;
        row.n = cfg.n;
        row.m = cfg.order;
        row.interleaver = to_string(cfg.interleaver);
        row.equalizer = to_string(cfg.equalizer.variant);
        row.snr_db = cfg.snr_db[p];
        row.counts = run_ber_point(cfg, cfg.snr_db[p], p);
        row.headline = HeadlineRate::Ber;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// Per-subcarrier noise variance at the post-decryption FFT output for a fixed
// channel: transpose interleaver, stream channel with CP, ZF. Data rides
// along and is subtracted, so the measurement covers the whole chain.
struct NoiseMeasurement {
    std::vector<double> per_subcarrier;
    std::uint64_t samples = 0;

    double mean() const
    {
        double s = 0.0;
        for (double v : per_subcarrier) s += v;
        return s / static_cast<double>(per_subcarrier.size());
    }
};

inline NoiseMeasurement measure_post_decryption_noise(const ChannelRealization& ch, std::size_t n,
                                                      std::size_t n_cp, double snr, std::size_t blocks,
                                                      std::uint64_t seed, const EqualizerKind& kind = EqualizerKind::zf())
{
    const QamConstellation qam(4);
    const Permutation tp = transpose_interleaver(n);
    const CVec w = equalizer_weights(freq_response(ch, n), kind, snr);
    const NoiseSpec noise = NoiseSpec::from_snr(snr);
    NoiseMeasurement out{std::vector<double>(n, 0.0), 0};
    for (std::size_t b = 0; b < blocks; ++b) {
        Rng rng = derive_rng(seed, 0, b);
        const CVec d = qam_modulate(random_bits(rng, n * n * 2), qam);
        std::vector<SampleBlock> x(n);
        for (std::size_t l = 0; l < n; ++l) x[l] = ifft_modulate({d.data() + l * n, n});
        auto enc = encrypt_block(x, tp);
        std::vector<SampleBlock> frames(n);
        for (std::size_t l = 0; l < n; ++l) frames[l] = add_cp(enc[l], n_cp);
        auto rx = apply_channel_frames(frames, ch, n_cp);
        for (std::size_t l = 0; l < n; ++l) {
            add_awgn_inplace(rx[l].samples, noise, rng);
            enc[l] = equalize_with(remove_cp(rx[l], n_cp), w);
        }
        const auto dec = decrypt_block(enc, tp);
        for (std::size_t l = 0; l < n; ++l) {
            const CVec y = fft_demodulate(dec[l]);
            for (std::size_t k = 0; k < n; ++k) out.per_subcarrier[k] += std::norm(y[k] - d[l * n + k]);
        }
    }
    const double per_bin = static_cast<double>(blocks * n);
    for (auto& v : out.per_subcarrier) v /= per_bin;
    out.samples = blocks * n * n;
    return out;
}

// ---------------------------------------------------------------------------
// Semi-analytic ZF curve with the transpose interleaver

struct SemiAnalyticConfig {
    std::size_t n = 256;
    unsigned order = 4;
    ChannelProfile profile = ChannelProfile::five_tap();
    std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30};
    std::size_t ensemble = 2000;
    EqualizerKind equalizer = EqualizerKind::zf();
    std::uint64_t seed = 1;
};

inline TrialReport run_semi_analytic(const SemiAnalyticConfig& cfg)
{
    if (cfg.ensemble == 0) throw ShapeError("semi-analytic ensemble must be nonempty");
    const QamConstellation qam(cfg.order);
    const auto ens = channel_ensemble(cfg.profile, cfg.n, cfg.seed, cfg.ensemble);
    TrialReport report;
    for (double s : cfg.snr_db) {
        const double snr = std::pow(10.0, s / 10.0);
        double mean = 0.0, sq = 0.0;
        for (const auto& h : ens) {
            const double b = qam_ber_awgn(conditional_snr_zf(h, snr, cfg.equalizer), cfg.order);
            mean += b;
            sq += b * b;
        }
        const double cnt = static_cast<double>(ens.size());
        mean /= cnt;
        const double var = std::max(0.0, sq / cnt - mean * mean);
        ReportRow row;
        row.experiment = "semi_analytic";
        row.n = cfg.n;
        row.m = cfg.order;
        row.interleaver = "transpose";
        row.equalizer = "zf";
        row.snr_db = s;
        row.counts.trials = ens.size();
        row.ber_override = mean;
        row.ci_override = 1.96 * std::sqrt(var / cnt);
        report.rows.push_back(std::move(row));
    }
    return report;
}

// SNR (dB) where a curve crosses target_ber, by linear interpolation of
// log10(BER) between the bracketing grid points. Points must be in ascending SNR.
inline std::optional<double> snr_at_ber(std::span<const std::pair<double, double>> curve, double target_ber)
{
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto [s0, b0] = curve[i - 1];
        const auto [s1, b1] = curve[i];
        if (b0 >= target_ber && b1 <= target_ber && b1 > 0.0) {
            if (b0 == b1) return s0;
            const double t = (std::log10(b0) - std::log10(target_ber)) / (std::log10(b0) - std::log10(b1));
            return s0 + t * (s1 - s0);
        }
    }
    return std::nullopt;
}

inline std::vector<std::pair<double, double>> ber_curve(const TrialReport& r)
{
    std::vector<std::pair<double, double>> c;
    for (const auto& row : r.rows) c.emplace_back(row.snr_db, row.ber());
    return c;
}

// ---------------------------------------------------------------------------
// SER of a receiver without the key when K of the N samples are reordered

struct SerExperimentConfig {
    std::size_t n = 256;
    std::vector<unsigned> orders{4, 16, 64};
    double snr_db = 30.0;
    std::vector<std::size_t> k_mixed{0, 8, 16, 32, 50, 56, 64, 128, 200, 256};
    std::size_t trials = 64;  // OFDM symbols per point
    std::uint64_t seed = 1;
    unsigned workers = 1;

    void validate() const
    {
        if (!is_power_of_two(n) || n < 4) throw ShapeError("N must be a power of two >= 4");
        for (unsigned m : orders) QamConstellation{m};
        for (auto k : k_mixed)
            if (k > n) throw ShapeError("k_mixed values must not exceed N");
        if (trials == 0) throw ShapeError("trials must be >= 1");
    }
};

// Picks `count` distinct positions uniformly and permutes their samples
// uniformly among themselves; every other sample keeps its place.
inline void mix_subset(std::span<Complex> x, std::size_t count, Rng& rng)
{
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<std::size_t> src(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t i = count; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(src[i - 1], src[pick(rng)]);
    }
    CVec vals(count);
    for (std::size_t i = 0; i < count; ++i) vals[i] = x[src[i]];
    for (std::size_t i = 0; i < count; ++i) x[idx[i]] = vals[i];
}

inline ErrorCounts simulate_ser_trial(std::size_t n, const QamConstellation& qam, double snr_db, std::size_t k_mixed,
                                      Rng& rng)
{
    const unsigned k = qam.bits_per_symbol();
    const Bits bits = random_bits(rng, n * k);
    std::vector<unsigned> tx(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = detail::symbol_index({bits.data() + i * k, k}, k);
    SampleBlock x = ifft_modulate(qam_modulate(bits, qam));
    add_awgn_inplace(x.samples, NoiseSpec::from_snr_db(snr_db), rng);
    mix_subset(x.samples, k_mixed, rng);
    ErrorCounts acc;
    acc.trials = 1;
    detail::count_errors(tx, fft_demodulate(x), qam, acc);
    return acc;
}

inline TrialReport run_ser_attack_experiment(const SerExperimentConfig& cfg)
{
    cfg.validate();
    TrialReport report;
    std::uint64_t point = 0;
    for (unsigned m : cfg.orders) {
        const QamConstellation qam(m);
        for (std::size_t km : cfg.k_mixed) {
            std::vector<ErrorCounts> slots(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
                Rng rng = derive_rng(cfg.seed, point, t);
                slots[t] = simulate_ser_trial(cfg.n, qam, cfg.snr_db, km, rng);
            });
            ReportRow row;
            row.experiment = "attack_ser";
            row.n = cfg.n;
            row.m = m;
            row.interleaver = "subset";
            row.equalizer = "none";
            row.snr_db = cfg.snr_db;
            row.k_mixed = km;
            for (const auto& s : slots) row.counts += s;
            row.headline = HeadlineRate::Ser;
            report.rows.push_back(std::move(row));
            ++point;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Chosen-plaintext permutation recovery

enum class AttackMethod { Averaging, BruteForce };

inline AttackMethod parse_attack_method(const std::string& s)
{
    if (s == "averaging") return AttackMethod::Averaging;
    if (s == "brute") return AttackMethod::BruteForce;
    throw ShapeError("unknown attack method '" + s + "' (averaging|brute)");
}

struct AttackScenario {
    std::size_t size = 64;
    unsigned order = 4;
    AttackConfig attack;
    AttackMethod method = AttackMethod::Averaging;
    std::size_t runs = 20;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    void validate() const
    {
        attack.validate();
        if (size == 0) throw ShapeError("attack size must be >= 1");
        if (runs == 0) throw ShapeError("attack runs must be >= 1");
        if (method == AttackMethod::BruteForce && size > kBruteForceMaxSize)
            throw BruteForceRefused(size, keyspace_bits(size));
        QamConstellation{order};
    }
};

// Chosen plaintext: one OFDM symbol of random QAM data when size is a power
// of two, unit-variance complex Gaussian samples otherwise.
inline CVec chosen_plaintext(std::size_t size, const QamConstellation& qam, Rng& rng)
{
    if (is_power_of_two(size) && size >= 4) {
        const Bits bits = random_bits(rng, size * qam.bits_per_symbol());
        return ifft_modulate(qam_modulate(bits, qam)).samples;
    }
    CVec x(size);
    for (auto& v : x) v = complex_gaussian(rng, 1.0);
    return x;
}

struct AttackRun {
    Permutation truth;
    Permutation estimate;
    std::size_t recovered = 0;
};

// The attacker repeats one chosen plaintext K times and sees each ciphertext
// in AWGN. With fresh_perm_per_block the sender uses P(l) for observation l;
// recovery is scored against P(0).
inline AttackRun simulate_attack_run(const AttackScenario& sc, Rng& rng)
{
    const QamConstellation qam(sc.order);
    const CVec x = chosen_plaintext(sc.size, qam, rng);
    std::vector<std::uint8_t> kb(32);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : kb) b = static_cast<std::uint8_t>(byte(rng));
    const SecretKey key(std::move(kb));
    const NoiseSpec noise = NoiseSpec::from_snr_db(sc.attack.snr_db);

    const Permutation truth = derive_permutation(key, 0, sc.size);
    ObservationAccumulator acc(sc.size);
    CVec obs(sc.size);
    for (std::size_t r = 0; r < sc.attack.repeats; ++r) {
        const Permutation p = sc.attack.fresh_perm_per_block && r > 0 ? derive_permutation(key, r, sc.size) : truth;
        for (std::size_t i = 0; i < sc.size; ++i) obs[i] = x[p[i]];
        add_awgn_inplace(obs, noise, rng);
        acc.add(obs);
    }
    const CVec mean = acc.mean();
    AttackRun run{truth, Permutation{}, 0};
    if (sc.method == AttackMethod::BruteForce)
        run.estimate = brute_force_attack(x, mean).estimate;
    else
        run.estimate = match_noiseless(x, mean, sc.attack.match_tolerance).estimate;
    run.recovered = recovered_positions(run.estimate, truth);
    return run;
}

// Row layout: k_mixed carries the repeat count K, symbol_errors counts
// positions not recovered and ser = 1 - recovery rate. trials counts runs.
inline TrialReport run_attack_recovery(const AttackScenario& sc)
{
    sc.validate();
    std::vector<std::size_t> hits(sc.runs);
    parallel_for(sc.runs, sc.workers, [&](std::size_t t) {
        Rng rng = derive_rng(sc.seed, 0, t);
        hits[t] = simulate_attack_run(sc, rng).recovered;
    });
    ReportRow row;
    row.experiment = sc.method == AttackMethod::BruteForce ? "attack_brute" : "attack_recovery";
    row.n = sc.size;
    row.m = sc.order;
    row.interleaver = sc.attack.fresh_perm_per_block ? "keyed-fresh" : "keyed-fixed";
    row.equalizer = "none";
    row.snr_db = sc.attack.snr_db;
    row.k_mixed = sc.attack.repeats;
    row.headline = HeadlineRate::Ser;
    row.counts.trials = sc.runs;
    row.counts.symbols = sc.runs * sc.size;
    for (auto h : hits) row.counts.symbol_errors += sc.size - h;
    TrialReport r;
    r.rows.push_back(std::move(row));
    return r;
}

// ---------------------------------------------------------------------------
// Attenuation / interference of a sample permutation on an ideal channel

struct IciReport {
    CVec alpha;
    std::vector<double> beta_power;

    double total_power() const
    {
        double s = 0.0;
        for (std::size_t k = 0; k < alpha.size(); ++k) s += std::norm(alpha[k]) + beta_power[k];
        return s;
    }
};

// alpha_k = E[Y_k d_k^*] / sigma_d^2 and E|Y_k - alpha_k d_k|^2, estimated
// from sums of Y d^*, |Y|^2 and |d|^2 over random data. sigma_d^2 is taken as
// the sample mean of |d_k|^2 so the identity map gives alpha = 1 exactly.
inline IciReport measure_ici(const Permutation& p, std::size_t trials, const QamConstellation& qam, std::uint64_t seed,
                             unsigned workers = 1)
{
    const std::size_t n = p.size();
    if (!is_power_of_two(n) || n < 4) throw ShapeError("ICI measurement needs a power-of-two N >= 4");
    if (trials == 0) throw ShapeError("trials must be >= 1");
    struct Sums {
        CVec yd;
        std::vector<double> yy, dd;
    };
    const std::size_t chunks = std::min<std::size_t>(trials, 64);
    std::vector<Sums> slots(chunks, Sums{CVec(n), std::vector<double>(n), std::vector<double>(n)});
    parallel_for(chunks, workers, [&](std::size_t c) {
        auto& s = slots[c];
        for (std::size_t t = c; t < trials; t += chunks) {
            Rng rng = derive_rng(seed, 0, t);
            const CVec d = qam_modulate(random_bits(rng, n * qam.bits_per_symbol()), qam);
            const SampleBlock x = ifft_modulate(d);
            const CVec y = fft(p.apply<Complex>(x.samples));
            for (std::size_t k = 0; k < n; ++k) {
                s.yd[k] += y[k] * std::conj(d[k]);
                s.yy[k] += std::norm(y[k]);
                s.dd[k] += std::norm(d[k]);
            }
        }
    });
    Sums tot{CVec(n), std::vector<double>(n), std::vector<double>(n)};
    for (const auto& s : slots)
        for (std::size_t k = 0; k < n; ++k) {
            tot.yd[k] += s.yd[k];
            tot.yy[k] += s.yy[k];
            tot.dd[k] += s.dd[k];
        }
    const double t = static_cast<double>(trials);
    IciReport rep{CVec(n), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const Complex a = tot.yd[k] / tot.dd[k];
        rep.alpha[k] = a;
        const double beta = tot.yy[k] / t - 2.0 * std::real(std::conj(a) * tot.yd[k] / t) + std::norm(a) * tot.dd[k] / t;
        rep.beta_power[k] = std::max(0.0, beta);
    }
    return rep;
}

} // namespace ofdmsec
