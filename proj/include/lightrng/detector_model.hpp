#pragma once

#include <cstdint>
#include <vector>

#include "lightrng/photon_core.hpp"

namespace lightrng {

/// Photodiode + transimpedance amplifier characterisation.
struct PhotodiodeSpec {
    double bandwidth_hz = 0.0;
    double responsivity_a_per_w = 0.0;
    double gain_ohm = 0.0;
    double wavelength_m = 0.0;
    double noise_sigma_v = 0.0;
    FockRange linear_range;

    void validate() const;
};

/// Digitiser characterisation.  enob may be fractional; the effective
/// resolution uses 2^enob while the bin map uses 2^ceil(enob) bins.
struct AdcSpec {
    int bit_depth = 0;
    double enob = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    double sample_rate_hz = 0.0;

    void validate() const;
};

/// One ADC bin: half-open [v_lo, v_hi), unbounded at the two ends.
struct VoltageBin {
    std::int64_t index = 0;
    double v_lo = 0.0;
    double v_hi = 0.0;
};

/// Photon -> voltage conversion factor  alpha = h c BW eta G / lambda.
double conversion_factor(const PhotodiodeSpec& spec);

/// Effective voltage resolution  deltaV = (v_max - v_min) / 2^enob.
double effective_resolution(const AdcSpec& adc);

/// Number of bins in the map, J = 2^ceil(enob).
std::int64_t bin_count(const AdcSpec& adc);

/// Smallest bin index; indices run [lowest_bin_index, lowest_bin_index + J - 1].
std::int64_t lowest_bin_index(const AdcSpec& adc);

/// Bin from its index (throws on out-of-range indices).
VoltageBin bin_by_index(std::int64_t index, const AdcSpec& adc);

/// The unique bin containing v.  Edges sit at v_min + k*deltaV; boundaries
/// belong to the upper bin; everything below v_min + deltaV is the lower end
/// bin and everything at or above v_min + (J-1)*deltaV the upper end bin.
VoltageBin bin_of_voltage(double v, const AdcSpec& adc);

/// Code emitted in raw streams: the bin index shifted to [0, J).
std::int64_t code_of_bin(const VoltageBin& bin, const AdcSpec& adc);
VoltageBin bin_of_code(std::int64_t code, const AdcSpec& adc);

struct Detection {
    double voltage = 0.0;
    VoltageBin bin;
};

/// Deterministic detection chain: clamp n to the linear range, convert to
/// voltage, add the (externally sampled) noise draw, digitise.
Detection detect(std::int64_t n, const PhotodiodeSpec& spec, const AdcSpec& adc, double noise_draw);

/// ADC support set of the entropy bound: all integers |x| <= floor(delta_v / (2 alpha_d)).
std::vector<std::int64_t> support_set(double delta_v, double alpha_d);

} // namespace lightrng
