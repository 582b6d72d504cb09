#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lightrng/certifier.hpp"
#include "lightrng/protocol.hpp"
#include "lightrng/rng.hpp"

namespace lightrng {

/// Light source fed into the tap beamsplitter each round.
struct SourceModel {
    enum class Kind { vacuum, coherent, thermal, fock, adversarial_fock };

    Kind kind = Kind::vacuum;
    double mean_n = 0.0;                   // coherent / thermal
    std::int64_t fock_n = 0;               // fock
    std::vector<std::int64_t> schedule;    // adversarial_fock, one n per round

    static SourceModel vacuum();
    static SourceModel coherent(double mean_n);
    static SourceModel thermal(double mean_n);
    static SourceModel fock(std::int64_t n);
    static SourceModel adversarial_fock(std::vector<std::int64_t> schedule);

    /// Validity for a run of m rounds (mean_n >= 0, schedule long enough).
    void validate(std::int64_t m) const;
};

/// Everything observed in one protocol round.  code_c / code_d are signed
/// bin indices; the photon counts are pre-clamp, so n_c + n_r == n_e and
/// n_a + n_b == n_r hold exactly in every record.
struct SampleRecord {
    std::int64_t n_e = 0;
    std::int64_t n_c = 0;
    std::int64_t n_r = 0;
    std::int64_t n_a = 0;
    std::int64_t n_b = 0;
    double v_c = 0.0;
    double v_d = 0.0;
    std::int64_t code_c = 0;
    std::int64_t code_d = 0;
    bool passed = false;
};

struct RunConfig {
    std::int64_t m = 0;
    std::uint64_t rng_seed = 0;
    ProtocolParams params;
    SourceModel source;
    CertThresholds thresholds;
};

/// Per-round RNG site tags; every (round, site) pair is its own stream.
namespace site {
inline constexpr std::uint64_t source = 0;
inline constexpr std::uint64_t tap_split = 1;
inline constexpr std::uint64_t cert_noise = 2;
inline constexpr std::uint64_t balanced_split = 3;
inline constexpr std::uint64_t diff_noise = 4;
} // namespace site

/// Photon number emitted in the given round.
std::int64_t sample_source(const SourceModel& model, std::int64_t round_index, CounterRng& rng);

/// Binomial split of n photons: returns (reflected, transmitted).
std::pair<std::int64_t, std::int64_t> split_beamsplitter(std::int64_t n, double r,
                                                         CounterRng& rng);

/// Full protocol run: source -> tap splitter -> certification detector;
/// transmitted mode -> balanced splitter -> difference detector.  Records
/// appear in round order and are bit-identical for identical configs.
std::vector<SampleRecord> run_protocol(const RunConfig& config);

/// Largest single-bin probability of N(mu, sigma^2) integrated over the
/// converter's bin map (sigma == 0 puts all mass in the bin containing mu).
double max_bin_mass_gaussian(double mu, double sigma, const AdcSpec& adc);

/// Fig-style empirical estimate: histogram v_d of passed records by ADC bin,
/// fit a Gaussian by moments on the binned representatives, and return
/// -log2 of the fitted curve's largest bin-integrated mass.  Requires at
/// least 1e5 passed records; a single-bin histogram yields 0 with a warning
/// on stderr.
double empirical_min_entropy(const std::vector<SampleRecord>& records, const AdcSpec& adc_d);

/// Device-dependent model curves over a grid of mean photon numbers at the
/// difference detector.
struct DdCurvePoint {
    double mean_n = 0.0;
    double h_dd_x = 0.0;      // -log2 max-bin mass, variance alpha_d^2 n + sigma_d^2
    double h_dd_x_cond = 0.0; // h_dd_x minus the noise-only entropy, clamped at 0
};

std::vector<DdCurvePoint> dd_min_entropy_models(const std::vector<double>& power_grid,
                                                const ProtocolParams& params);

/// CSV export/import, one row per round, columns in SampleRecord field order.
void write_records_csv(const std::string& path, const std::vector<SampleRecord>& records);
std::vector<SampleRecord> read_records_csv(const std::string& path);

/// Pack code_d of (by default only passed) records as fixed-width big-endian
/// codes, shifted to [0, 2^bits); bits must cover the full bin map.
std::vector<std::uint8_t> pack_code_stream(const std::vector<SampleRecord>& records,
                                           const AdcSpec& adc_d, int bits_per_code,
                                           bool passed_only = true);
void write_code_stream(const std::string& path, const std::vector<SampleRecord>& records,
                       const AdcSpec& adc_d, int bits_per_code, bool passed_only = true);

} // namespace lightrng
