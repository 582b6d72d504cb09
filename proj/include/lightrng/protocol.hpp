#pragma once

#include <cstdint>

#include "lightrng/detector_model.hpp"

namespace lightrng {

/// Full optical/electronic configuration of the setup: the tap splitter that
/// feeds the certification detector, the balanced splitter that feeds the
/// difference detector, both digitisers, and the saturation photon number of
/// the difference arm.
struct ProtocolParams {
    double r0 = 0.5;  ///< randomness splitter; the protocol requires exactly 1/2
    double r1 = 0.0;  ///< certification tap reflectivity, in (0, 1)
    PhotodiodeSpec detector_c;
    PhotodiodeSpec detector_diff;  ///< noise_sigma_v holds the combined difference noise
    AdcSpec adc_c;
    AdcSpec adc_d;
    std::int64_t n_r_plus = 0;  ///< saturation photon number of the difference measurement

    void validate() const;
};

} // namespace lightrng
