// ofdmsec command line: key handling, IQ file encryption and the simulation
// experiments. Every option can also come from a `key = value` config file
// (--config); flags given on the command line win.

#include <ofdmsec/ofdmsec.hpp>

#include <CLI11.hpp>

#include <sodium.h>

#include <fstream>
#include <iostream>
#include <map>

using namespace ofdmsec;

namespace {

struct Settings {
    KeyValueConfig cfg;

    std::optional<std::string> raw(const std::string& key) const { return cfg.get(key); }

    std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }

    std::string required(const std::string& key) const
    {
        auto v = raw(key);
        if (!v || v->empty()) throw CLI::ValidationError("--" + key, "is required");
        return *v;
    }

    std::uint64_t u64(const std::string& key, std::uint64_t def) const
    {
        auto v = raw(key);
        return v ? parse_u64(key, *v) : def;
    }

    double real(const std::string& key, double def) const
    {
        auto v = raw(key);
        return v ? parse_real(key, *v) : def;
    }

    bool flag(const std::string& key, bool def) const
    {
        auto v = raw(key);
        if (!v) return def;
        if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
        if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
        throw ShapeError(key + ": expected a boolean, got '" + *v + "'");
    }

    // Comma-separated values; `a:step:b` expands to an inclusive range.
    std::vector<double> reals(const std::string& key, std::vector<double> def) const
    {
        auto v = raw(key);
        if (!v) return def;
        std::vector<double> out;
        for (const auto& item : split(*v)) {
            const auto parts = split(item, ':');
            if (parts.size() == 3) {
                const double a = parse_real(key, parts[0]), step = parse_real(key, parts[1]),
                             b = parse_real(key, parts[2]);
                if (!(step > 0.0)) throw ShapeError(key + ": range step must be positive");
                for (int i = 0; a + i * step <= b + 1e-9; ++i) out.push_back(a + i * step);
            } else {
                out.push_back(parse_real(key, item));
            }
        }
        return out;
    }

    std::vector<std::size_t> sizes(const std::string& key, std::vector<std::size_t> def) const
    {
        auto v = raw(key);
        if (!v) return def;
        std::vector<std::size_t> out;
        for (double d : reals(key, {})) {
            if (d < 0 || d != std::floor(d)) throw ShapeError(key + ": expected nonnegative integers");
            out.push_back(static_cast<std::size_t>(d));
        }
        return out;
    }

    static std::vector<std::string> split(const std::string& s, char sep = ',')
    {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep)) {
            item = detail::trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static std::uint64_t parse_u64(const std::string& key, const std::string& s)
    {
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
            v = std::stoull(s, &used, 0);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ShapeError(key + ": expected an unsigned integer, got '" + s + "'");
        return v;
    }

    static double parse_real(const std::string& key, const std::string& s)
    {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ShapeError(key + ": expected a number, got '" + s + "'");
        return v;
    }
};

// Registers string-valued options whose names double as config keys.
class Command {
public:
    Command(CLI::App& app, const std::string& name, const std::string& help, bool simulation)
        : sub_(app.add_subcommand(name, help)), simulation_(simulation)
    {
        sub_->add_option("--config", config_path_, "key = value config file");
        if (simulation_) {
            opt("seed", "master seed (required)");
            opt("workers", "worker threads (results do not depend on it)");
            opt("out", "CSV output path, standard output when omitted");
        }
    }

    Command& opt(const std::string& key, const std::string& help)
    {
        auto* o = sub_->add_option("--" + key, values_[key], help);
        options_[key] = o;
        return *this;
    }

    CLI::App* app() const { return sub_; }
    bool parsed() const { return sub_->parsed(); }

    Settings settings() const
    {
        Settings s;
        if (!config_path_.empty()) s.cfg = KeyValueConfig::load(config_path_);
        for (const auto& [key, o] : options_)
            if (o->count() > 0) s.cfg.set(key, values_.at(key));
        if (simulation_ && !s.raw("seed")) throw CLI::ValidationError("--seed", "is required for simulations");
        return s;
    }

private:
    CLI::App* sub_;
    bool simulation_;
    std::string config_path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> options_;
};

unsigned workers_of(const Settings& s)
{
    return static_cast<unsigned>(s.u64("workers", default_workers()));
}

void emit_csv(const Settings& s, const TrialReport& r)
{
    const auto out = s.raw("out");
    if (!out) {
        write_csv(std::cout, r);
        return;
    }
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw IoError("cannot write " + *out);
    write_csv(f, r);
    if (!f) throw IoError("write failed for " + *out);
}

ChannelProfile profile_of(const Settings& s)
{
    const auto path = s.raw("profile");
    if (!path || *path == "five_tap") return ChannelProfile::five_tap();
    if (*path == "flat") return ChannelProfile::flat();
    return load_profile(*path);
}

EqualizerKind equalizer_of(const Settings& s)
{
    EqualizerKind k{parse_equalizer(s.str("equalizer", "zf"))};
    k.zf_floor = s.real("zf_floor", k.zf_floor);
    k.deep_fade_threshold = s.real("deep_fade_threshold", 0.0);
    k.discard_deep_fades = s.flag("discard_deep_fades", false);
    k.deep_fade_bias = s.real("deep_fade_bias", 0.0);
    return k;
}

// ----------------------------------------------------------------------------

int cmd_keygen(const Settings& s)
{
    const std::string out = s.required("out");
    const std::string format = s.str("format", "hex");
    if (format != "hex" && format != "raw") throw ShapeError("--format must be hex or raw");
    std::vector<std::uint8_t> key;
    if (auto hex = s.raw("from-hex")) {
        key = from_hex(*hex);
    } else {
        key.resize(s.u64("bytes", 32));
        ensure_sodium();
        randombytes_buf(key.data(), key.size());
    }
    const SecretKey checked(key);
    if (format == "hex") {
        const std::string text = to_hex(checked.bytes()) + "\n";
        detail::write_all(out, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    } else {
        detail::write_all(out, checked.bytes());
    }
    sodium_memzero(key.data(), key.size());
    return 0;
}

int cmd_crypt(const Settings& s, bool decrypt)
{
    const SecretKey key = read_key_file(s.required("key"));
    const CVec samples = read_iq(s.required("in"));
    const std::size_t n = s.u64("N", 256);
    const std::size_t depth = s.u64("L", 1);
    const std::uint64_t start = s.u64("block-start", 0);
    if (n == 0 || depth == 0) throw ShapeError("N and L must be positive");
    const std::size_t block = n * depth;
    if (samples.size() % block != 0)
        throw IoError("input holds " + std::to_string(samples.size()) + " samples, not a multiple of L*N = " +
                      std::to_string(block));

    CVec out;
    out.reserve(samples.size());
    for (std::size_t b = 0; b < samples.size() / block; ++b) {
        std::vector<SampleBlock> blocks(depth);
        for (std::size_t l = 0; l < depth; ++l) {
            const auto first = samples.begin() + static_cast<std::ptrdiff_t>(b * block + l * n);
            blocks[l].samples.assign(first, first + static_cast<std::ptrdiff_t>(n));
        }
        const Permutation p = derive_permutation(key, start + b, block);
        const auto res = decrypt ? decrypt_block(blocks, p) : encrypt_block(blocks, p);
        for (const auto& r : res) out.insert(out.end(), r.samples.begin(), r.samples.end());
    }
    write_iq(s.required("out"), out);
    return 0;
}

int cmd_simulate_ber(const Settings& s)
{
    BerExperimentConfig cfg;
    cfg.n = s.u64("N", cfg.n);
    cfg.order = static_cast<unsigned>(s.u64("M", cfg.order));
    cfg.n_cp = s.u64("Ncp", cfg.n_cp);
    cfg.interleaver = parse_interleaver(s.str("interleaver", to_string(cfg.interleaver)));
    cfg.depth = s.u64("L", cfg.depth);
    cfg.block_symbols = s.u64("block_symbols", cfg.block_symbols);
    cfg.equalizer = equalizer_of(s);
    cfg.snr_db = s.reals("snr_db", cfg.snr_db);
    cfg.profile = profile_of(s);
    cfg.min_blocks = s.u64("min_blocks", cfg.min_blocks);
    cfg.target_errors = s.u64("target_errors", cfg.target_errors);
    cfg.max_bits = s.u64("max_bits", cfg.max_bits);
    cfg.max_blocks = s.u64("max_blocks", cfg.max_blocks);
    cfg.batch_blocks = s.u64("batch_blocks", cfg.batch_blocks);
    cfg.seed = s.u64("seed", cfg.seed);
    cfg.workers = workers_of(s);
    cfg.label = s.str("label", cfg.label);
    emit_csv(s, run_ber_experiment(cfg));
    return 0;
}

int cmd_attack_ser(const Settings& s)
{
    SerExperimentConfig cfg;
    cfg.n = s.u64("N", cfg.n);
    std::vector<unsigned> orders;
    for (auto m : s.sizes("M", {4, 16, 64})) orders.push_back(static_cast<unsigned>(m));
    cfg.orders = orders;
    cfg.snr_db = s.real("snr_db", cfg.snr_db);
    cfg.k_mixed = s.sizes("k_mixed", cfg.k_mixed);
    cfg.trials = s.u64("trials", cfg.trials);
    cfg.seed = s.u64("seed", cfg.seed);
    cfg.workers = workers_of(s);
    emit_csv(s, run_ser_attack_experiment(cfg));
    return 0;
}

int cmd_attack_recovery(const Settings& s)
{
    AttackScenario sc;
    sc.size = s.u64("size", sc.size);
    sc.order = static_cast<unsigned>(s.u64("M", sc.order));
    sc.attack.snr_db = s.real("snr_db", 0.0);
    sc.attack.fresh_perm_per_block = s.flag("fresh_perm_per_block", false);
    sc.attack.match_tolerance = s.real("match_tolerance", sc.attack.match_tolerance);
    sc.method = parse_attack_method(s.str("method", "averaging"));
    sc.runs = s.u64("runs", sc.runs);
    sc.seed = s.u64("seed", sc.seed);
    sc.workers = workers_of(s);
    TrialReport all;
    for (auto k : s.sizes("K", {1})) {
        sc.attack.repeats = k;
        for (auto& row : run_attack_recovery(sc).rows) all.rows.push_back(std::move(row));
    }
    emit_csv(s, all);
    return 0;
}

int cmd_analyze_snr(const Settings& s)
{
    SemiAnalyticConfig cfg;
    cfg.n = s.u64("N", cfg.n);
    cfg.order = static_cast<unsigned>(s.u64("M", cfg.order));
    cfg.profile = profile_of(s);
    cfg.snr_db = s.reals("snr_db", cfg.snr_db);
    cfg.ensemble = s.u64("ensemble", cfg.ensemble);
    cfg.equalizer = equalizer_of(s);
    if (cfg.equalizer.variant != EqualizerVariant::ZF) throw ShapeError("analyze-snr models the ZF equalizer only");
    cfg.seed = s.u64("seed", cfg.seed);
    cfg.profile.validate();
    emit_csv(s, run_semi_analytic(cfg));
    return 0;
}

Permutation ici_permutation(const Settings& s, std::size_t n)
{
    const std::string kind = s.str("permutation", "keyed");
    if (kind == "identity") return Permutation::identity(n);
    if (kind == "reversal") {
        std::vector<std::size_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = n - 1 - i;
        return Permutation(std::move(m));
    }
    if (kind == "keyed") {
        const auto path = s.raw("key");
        std::vector<std::uint8_t> kb(32);
        if (path) {
            const SecretKey k = read_key_file(*path);
            return derive_permutation(k, s.u64("block", 0), n);
        }
        Rng rng = derive_rng(s.u64("seed", 0), ~0ULL, 0);
        std::uniform_int_distribution<int> byte(0, 255);
        for (auto& b : kb) b = static_cast<std::uint8_t>(byte(rng));
        return derive_permutation(SecretKey(kb), s.u64("block", 0), n);
    }
    throw ShapeError("--permutation must be keyed, identity or reversal");
}

int cmd_measure_ici(const Settings& s)
{
    const std::size_t n = s.u64("N", 256);
    const QamConstellation qam(static_cast<unsigned>(s.u64("M", 4)));
    const auto rep = measure_ici(ici_permutation(s, n), s.u64("trials", 10000), qam, s.u64("seed", 0), workers_of(s));
    std::ostringstream os;
    os << "k,alpha_re,alpha_im,alpha_abs2,beta_power\n";
    for (std::size_t k = 0; k < n; ++k)
        os << k << ',' << format_g6(rep.alpha[k].real()) << ',' << format_g6(rep.alpha[k].imag()) << ','
           << format_g6(std::norm(rep.alpha[k])) << ',' << format_g6(rep.beta_power[k]) << '\n';
    const auto out = s.raw("out");
    if (!out) {
        std::cout << os.str();
    } else {
        const std::string text = os.str();
        detail::write_all(*out, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    return 0;
}

int cmd_make_iq(const Settings& s)
{
    Rng rng(s.u64("seed", 1));
    CVec x(s.u64("samples", 1024));
    for (auto& v : x) v = complex_gaussian(rng, 1.0);
    write_iq(s.required("out"), x);
    return 0;
}

int cmd_compare_iq(const std::string& a, const std::string& b, double min_differ)
{
    const CVec x = read_iq(a), y = read_iq(b);
    if (x.size() != y.size()) throw IoError("files hold different sample counts");
    std::size_t differ = 0;
    for (std::size_t i = 0; i < x.size(); ++i) differ += x[i] != y[i];
    const double frac = x.empty() ? 0.0 : static_cast<double>(differ) / static_cast<double>(x.size());
    std::cout << "samples=" << x.size() << " differ=" << differ << " fraction=" << format_g6(frac) << '\n';
    return frac >= min_differ ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Permutation-based physical-layer security for OFDM"};
    app.require_subcommand(1);

    Command keygen(app, "keygen", "write a fresh secret key", false);
    keygen.opt("out", "key file").opt("bytes", "key length (default 32)").opt("format", "hex|raw").opt(
        "from-hex", "use these key bytes instead of random ones");

    Command enc(app, "encrypt", "permute the samples of an IQ file", false);
    Command dec(app, "decrypt", "undo encrypt", false);
    for (Command* c : {&enc, &dec})
        c->opt("key", "key file").opt("in", "input IQ").opt("out", "output IQ").opt("N", "subcarriers").opt(
            "L", "OFDM symbols per permuted block").opt("block-start", "index of the first block");

    Command ber(app, "simulate-ber", "BER versus SNR over Rayleigh multipath", true);
    for (const char* k : {"N", "M", "Ncp", "interleaver", "L", "block_symbols", "equalizer", "zf_floor",
                          "deep_fade_threshold", "discard_deep_fades", "deep_fade_bias", "snr_db", "profile",
                          "min_blocks", "target_errors", "max_bits", "max_blocks", "batch_blocks", "label"})
        ber.opt(k, k);

    Command ser(app, "simulate-attack-ser", "SER of a keyless receiver versus samples mixed", true);
    for (const char* k : {"N", "M", "snr_db", "k_mixed", "trials"}) ser.opt(k, k);

    Command rec(app, "simulate-attack-recovery", "chosen-plaintext permutation recovery", true);
    for (const char* k : {"size", "M", "snr_db", "K", "fresh_perm_per_block", "match_tolerance", "method", "runs"})
        rec.opt(k, k);

    Command snr(app, "analyze-snr", "semi-analytic ZF BER from the conditional SNR", true);
    for (const char* k : {"N", "M", "profile", "snr_db", "ensemble", "equalizer", "zf_floor"}) snr.opt(k, k);

    Command ici(app, "measure-ici", "attenuation and interference of a sample permutation", true);
    for (const char* k : {"N", "M", "trials", "permutation", "key", "block"}) ici.opt(k, k);

    Command make(app, "make-iq", "write complex Gaussian samples to an IQ file", false);
    make.opt("out", "IQ file").opt("samples", "sample count").opt("seed", "seed");

    auto* cmp = app.add_subcommand("compare-iq", "report the fraction of differing samples");
    std::string cmp_a, cmp_b;
    double min_differ = 0.0;
    cmp->add_option("a", cmp_a)->required();
    cmp->add_option("b", cmp_b)->required();
    cmp->add_option("--min-differ", min_differ, "exit 1 when the differing fraction is lower");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keygen.parsed()) return cmd_keygen(keygen.settings());
        if (enc.parsed()) return cmd_crypt(enc.settings(), false);
        if (dec.parsed()) return cmd_crypt(dec.settings(), true);
        if (ber.parsed()) return cmd_simulate_ber(ber.settings());
        if (ser.parsed()) return cmd_attack_ser(ser.settings());
        if (rec.parsed()) return cmd_attack_recovery(rec.settings());
        if (snr.parsed()) return cmd_analyze_snr(snr.settings());
        if (ici.parsed()) return cmd_measure_ici(ici.settings());
        if (make.parsed()) return cmd_make_iq(make.settings());
        if (cmp->parsed()) return cmd_compare_iq(cmp_a, cmp_b, min_differ);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
