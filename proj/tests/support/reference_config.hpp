#pragma once

#include <cstdint>

#include "lightrng/certifier.hpp"
#include "lightrng/protocol.hpp"

// A fully worked full-scale configuration shared by the test suites: a 5 GHz
// certification detector on a 9.65 % tap with a 14-bit digitiser, a 1.6 GHz
// balanced difference detector on a 16-bit digitiser, and a pass window that
// a ~2.7e7-photon coherent input clears with ~7.8 sigma of margin on both
// sides while certifying ~2.3e7 photons at the difference arm.
namespace refcfg {

inline lightrng::ProtocolParams params() {
    lightrng::ProtocolParams p;
    p.r0 = 0.5;
    p.r1 = 0.0965;
    p.detector_c = {5e9, 1.04, 50.0, 1550e-9, 0.25e-3, lightrng::FockRange{0, 100'000'000}};
    p.detector_diff = {1.6e9, 0.95, 16000.0, 1550e-9, 3.05e-3, lightrng::FockRange{0, 25'600'000}};
    p.adc_c = {14, 12.0, 0.0, 0.16, 1.25e9};
    p.adc_d = {16, 14.0, -0.16, 0.16, 1.25e9};
    p.n_r_plus = 25'600'000;
    return p;
}

inline lightrng::CertThresholds thresholds(const lightrng::ProtocolParams& p) {
    return lightrng::thresholds_from_bins(110, 211, p.adc_c);
}

// Honest coherent operating point centred in the pass window.
constexpr double kMeanPhotons = 2.6835e7;
constexpr std::int64_t kRounds = 125'000;
constexpr double kEpsFailLog10 = -10.0;

// The same configuration as a config file body: loading this text must
// reproduce params(), thresholds(), and the operating point above exactly.
inline const char* config_text() {
    return "# full-scale coherent reference setup\n"
           "r0 = 0.5\n"
           "r1 = 0.0965\n"
           "\n"
           "cert_bandwidth_hz = 5e9\n"
           "cert_responsivity_a_per_w = 1.04\n"
           "cert_gain_ohm = 50.0\n"
           "cert_wavelength_m = 1550e-9\n"
           "cert_sigma_volts = 0.25e-3\n"
           "cert_linear_min_photons = 0\n"
           "cert_linear_max_photons = 100000000\n"
           "\n"
           "diff_bandwidth_hz = 1.6e9\n"
           "diff_responsivity_a_per_w = 0.95\n"
           "diff_gain_ohm = 16000.0\n"
           "diff_wavelength_m = 1550e-9\n"
           "diff_sigma_volts = 3.05e-3\n"
           "diff_linear_min_photons = 0\n"
           "diff_linear_max_photons = 25600000\n"
           "\n"
           "adc_c_bit_depth = 14\n"
           "adc_c_enob = 12.0\n"
           "adc_c_v_min_volts = 0.0\n"
           "adc_c_v_max_volts = 0.16\n"
           "adc_c_sample_rate_hz = 1.25e9\n"
           "\n"
           "adc_d_bit_depth = 16\n"
           "adc_d_enob = 14.0\n"
           "adc_d_v_min_volts = -0.16\n"
           "adc_d_v_max_volts = 0.16\n"
           "adc_d_sample_rate_hz = 1.25e9\n"
           "\n"
           "n_r_plus_photons = 25600000\n"
           "threshold_bin_lo = 110\n"
           "threshold_bin_hi = 211\n"
           "\n"
           "source_kind = coherent\n"
           "source_mean_photons = 2.6835e7\n"
           "rounds = 125000\n"
           "rng_seed = 20260814\n"
           "eps_fail_log10 = -10.0\n"
           "lambda_split = 0.5\n";
}

} // namespace refcfg
