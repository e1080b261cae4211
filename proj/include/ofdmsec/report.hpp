#pragma once

// Error-count accumulation and the CSV results format.
//
// Columns: experiment,N,M,interleaver,equalizer,snr_db,k_mixed,trials,
//          bit_errors,ber,symbol_errors,ser,ci95
// Floats use 6 significant digits (%.6g). k_mixed is empty where it does not
// apply. ci95 is the Wald half-width 1.96 sqrt(p (1 - p) / n) of the row's
// headline rate: BER for BER experiments, SER otherwise.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ofdmsec {

struct ErrorCounts {
    std::uint64_t trials = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;

    ErrorCounts& operator+=(const ErrorCounts& o)
    {
        trials += o.trials;
        bits += o.bits;
        bit_errors += o.bit_errors;
        symbols += o.symbols;
        symbol_errors += o.symbol_errors;
        return *this;
    }

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
    double ser() const
    {
        return symbols == 0 ? 0.0 : static_cast<double>(symbol_errors) / static_cast<double>(symbols);
    }
};

inline double wald_ci95(double p, std::uint64_t n)
{
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

enum class HeadlineRate { Ber, Ser };

struct ReportRow {
    std::string experiment;
    std::size_t n = 0;
    unsigned m = 0;
    std::string interleaver;
    std::string equalizer;
    double snr_db = 0.0;
    std::optional<std::size_t> k_mixed;
    ErrorCounts counts;
    HeadlineRate headline = HeadlineRate::Ber;
    std::optional<double> ber_override;  // semi-analytic rows carry a computed BER
    std::optional<double> ci_override;

    double ber() const { return ber_override ? *ber_override : counts.ber(); }
    double ser() const { return counts.ser(); }

    double ci95() const
    {
        if (ci_override) return *ci_override;
        return headline == HeadlineRate::Ber ? wald_ci95(ber(), counts.bits) : wald_ci95(ser(), counts.symbols);
    }
};

struct TrialReport {
    std::vector<ReportRow> rows;

    const ReportRow* find(const std::string& experiment, double snr_db) const
    {
        for (const auto& r : rows)
            if (r.experiment == experiment && std::abs(r.snr_db - snr_db) < 1e-9) return &r;
        return nullptr;
    }
};

inline std::string format_g6(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline constexpr const char* kCsvHeader =
    "experiment,N,M,interleaver,equalizer,snr_db,k_mixed,trials,bit_errors,ber,symbol_errors,ser,ci95";

inline void write_csv(std::ostream& os, const TrialReport& report, bool header = true)
{
    if (header) os << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.experiment << ',' << r.n << ',' << r.m << ',' << r.interleaver << ',' << r.equalizer << ','
           << format_g6(r.snr_db) << ',' << (r.k_mixed ? std::to_string(*r.k_mixed) : std::string{}) << ','
           << r.counts.trials << ',' << r.counts.bit_errors << ',' << format_g6(r.ber()) << ','
           << r.counts.symbol_errors << ',' << format_g6(r.ser()) << ',' << format_g6(r.ci95()) << '\n';
    }
}

inline std::string to_csv(const TrialReport& report, bool header = true)
{
    std::ostringstream os;
    write_csv(os, report, header);
    return os.str();
}

} // namespace ofdmsec
