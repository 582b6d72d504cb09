#pragma once

/// Flat `key = value` configuration files with `#` comments.  Keys carry
/// their units explicitly (e.g. diff_sigma_volts, source_mean_photons); the
/// loaders never infer units.  Every artefact the toolkit emits records the
/// configuration digest so outputs can be traced to their exact inputs.

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lightrng/certifier.hpp"
#include "lightrng/protocol.hpp"
#include "lightrng/simulator.hpp"

namespace lightrng {

class ConfigFile {
public:
    /// Parses a file.  Throws ParseError naming the file and line for
    /// malformed lines, duplicate keys, or keys outside [a-z0-9_].
    static ConfigFile load(const std::string& path);

    /// Parses configuration text directly; `name` labels error messages.
    static ConfigFile from_string(const std::string& text,
                                  const std::string& name = "<string>");

    bool has(const std::string& key) const;

    /// Typed getters.  Missing keys and non-parsing values throw ParseError
    /// naming the key.  The _or variants substitute the fallback for missing
    /// keys but still reject malformed values.
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;

    /// FNV-1a (64-bit) over the raw configuration bytes, and its 16-digit
    /// lowercase hex form.
    std::uint64_t digest() const { return digest_; }
    std::string digest_hex() const;

    /// Keys never queried through any getter, in file order — surfaced as
    /// warnings so misspelled keys cannot silently fall back to defaults.
    std::vector<std::string> unused_keys() const;

    const std::string& name() const { return name_; }

private:
    std::string name_;
    std::uint64_t digest_ = 0;
    std::vector<std::pair<std::string, std::string>> entries_;
    mutable std::unordered_set<std::string> accessed_;

    const std::string* find(const std::string& key) const;
};

/// FNV-1a 64-bit hash of arbitrary bytes (the digest primitive).
std::uint64_t fnv1a64(const void* data, std::size_t size);

/// Photodiode block under a key prefix: <prefix>_bandwidth_hz,
/// _responsivity_a_per_w, _gain_ohm, _wavelength_m, _sigma_volts,
/// _linear_min_photons, and optional _linear_max_photons (absent means
/// unbounded).
PhotodiodeSpec load_photodiode(const ConfigFile& cfg, const std::string& prefix);

/// ADC block under a prefix: <prefix>_bit_depth, _enob, _v_min_volts,
/// _v_max_volts, _sample_rate_hz.
AdcSpec load_adc(const ConfigFile& cfg, const std::string& prefix);

/// Full optical-chain parameters: r0, r1, the `cert` and `diff` photodiode
/// blocks, the `adc_c` and `adc_d` ADC blocks, and n_r_plus_photons.
ProtocolParams load_protocol_params(const ConfigFile& cfg);

/// Certification window from bin indices threshold_bin_lo / threshold_bin_hi
/// on the certification ADC.
CertThresholds load_thresholds(const ConfigFile& cfg, const ProtocolParams& params);

/// Source description: source_kind in {vacuum, coherent, thermal, fock,
/// adversarial_fock} plus source_mean_photons, source_fock_n, or
/// source_schedule_file as the kind requires.
SourceModel load_source(const ConfigFile& cfg);

/// Photon-number schedule file: one integer per line, `#` comments allowed.
std::vector<std::int64_t> load_schedule_file(const std::string& path);

/// Complete simulation run: rounds, rng_seed, and everything above.
RunConfig load_run_config(const ConfigFile& cfg);

} // namespace lightrng
