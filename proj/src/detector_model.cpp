#include "lightrng/detector_model.hpp"

#include <cmath>
#include <limits>

#include "lightrng/errors.hpp"

namespace lightrng {

namespace {
// Exact SI values.
constexpr double kPlanck = 6.62607015e-34;
constexpr double kLightSpeed = 2.99792458e8;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

void PhotodiodeSpec::validate() const {
    if (!(bandwidth_hz > 0) || !(responsivity_a_per_w > 0) || !(gain_ohm > 0) ||
        !(wavelength_m > 0) || !(noise_sigma_v >= 0))
        throw ContractError("PhotodiodeSpec: bandwidth, responsivity, gain, wavelength must be positive");
    if (linear_range.n_lo < 0 || linear_range.n_lo >= linear_range.n_hi)
        throw ContractError("PhotodiodeSpec: linear range requires 0 <= n_lo < n_hi");
}

void AdcSpec::validate() const {
    if (!(enob > 0) || enob > double(bit_depth))
        throw ContractError("AdcSpec: need 0 < enob <= bit_depth");
    if (!(v_min < v_max)) throw ContractError("AdcSpec: need v_min < v_max");
    if (!(sample_rate_hz >= 0)) throw ContractError("AdcSpec: negative sample rate");
}

double conversion_factor(const PhotodiodeSpec& spec) {
    spec.validate();
    return kPlanck * kLightSpeed * spec.bandwidth_hz * spec.responsivity_a_per_w * spec.gain_ohm /
           spec.wavelength_m;
}

double effective_resolution(const AdcSpec& adc) {
    adc.validate();
    return (adc.v_max - adc.v_min) / std::exp2(adc.enob);
}

std::int64_t bin_count(const AdcSpec& adc) {
    adc.validate();
    return std::int64_t{1} << static_cast<int>(std::ceil(adc.enob));
}

std::int64_t lowest_bin_index(const AdcSpec& adc) {
    const std::int64_t j = bin_count(adc);
    // floor(-(J-1)/2): even J gets the extra bin on the negative side.
    return j % 2 == 0 ? -(j / 2) : -((j - 1) / 2);
}

VoltageBin bin_by_index(std::int64_t index, const AdcSpec& adc) {
    const std::int64_t j_count = bin_count(adc);
    const std::int64_t j_lo = lowest_bin_index(adc);
    if (index < j_lo || index >= j_lo + j_count)
        throw ContractError("bin_by_index: index outside the bin map");
    const double dv = effective_resolution(adc);
    const std::int64_t k = index - j_lo;
    VoltageBin bin;
    bin.index = index;
    bin.v_lo = k == 0 ? -kInf : adc.v_min + double(k) * dv;
    bin.v_hi = k == j_count - 1 ? kInf : adc.v_min + double(k + 1) * dv;
    return bin;
}

VoltageBin bin_of_voltage(double v, const AdcSpec& adc) {
    if (!std::isfinite(v)) throw ContractError("bin_of_voltage: non-finite voltage");
    const std::int64_t j_count = bin_count(adc);
    const std::int64_t j_lo = lowest_bin_index(adc);
    const double dv = effective_resolution(adc);
    std::int64_t k;
    if (v < adc.v_min + dv) {
        k = 0;
    } else if (v >= adc.v_min + double(j_count - 1) * dv) {
        k = j_count - 1;
    } else {
        k = static_cast<std::int64_t>(std::floor((v - adc.v_min) / dv));
        // floating division can land on either side of an exact edge; nudge
        // into the half-open convention
        if (adc.v_min + double(k + 1) * dv <= v) ++k;
        if (adc.v_min + double(k) * dv > v) --k;
        if (k < 1) k = 1;
        if (k > j_count - 2) k = j_count - 2;
    }
    return bin_by_index(j_lo + k, adc);
}

std::int64_t code_of_bin(const VoltageBin& bin, const AdcSpec& adc) {
    return bin.index - lowest_bin_index(adc);
}

VoltageBin bin_of_code(std::int64_t code, const AdcSpec& adc) {
    return bin_by_index(code + lowest_bin_index(adc), adc);
}

Detection detect(std::int64_t n, const PhotodiodeSpec& spec, const AdcSpec& adc, double noise_draw) {
    spec.validate();
    const double alpha = conversion_factor(spec);
    std::int64_t clamped = n;
    if (clamped < spec.linear_range.n_lo) clamped = spec.linear_range.n_lo;
    if (spec.linear_range.is_bounded() && clamped > spec.linear_range.n_hi)
        clamped = spec.linear_range.n_hi;
    Detection det;
    det.voltage = alpha * double(clamped) + noise_draw;
    det.bin = bin_of_voltage(det.voltage, adc);
    return det;
}

std::vector<std::int64_t> support_set(double delta_v, double alpha_d) {
    if (!(alpha_d > 0)) throw ContractError("support_set: conversion factor must be positive");
    if (!(delta_v >= 0)) throw ContractError("support_set: negative resolution");
    const double h = std::floor(delta_v / (2.0 * alpha_d));
    if (h > 1e8) throw ContractError("support_set: support would exceed 1e8 elements");
    const std::int64_t hw = static_cast<std::int64_t>(h);
    std::vector<std::int64_t> xs;
    xs.reserve(2 * hw + 1);
    for (std::int64_t x = -hw; x <= hw; ++x) xs.push_back(x);
    return xs;
}

} // namespace lightrng
