#pragma once

#include <cstdint>
#include <limits>

#include "lightrng/logprob.hpp"

namespace lightrng {

/// ln(erfc(x)) without underflow for large x.
///
/// Uses std::erfc directly while the result is representable and switches
/// to the asymptotic expansion -x^2 - ln(x*sqrt(pi)) + ln(1 - 1/(2x^2) + ...)
/// beyond that, so arguments in the thousands are fine.
double ln_erfc(double x);

/// Inverse of erfc on [0, inf): returns x >= 0 with erfc(x) = eps.
///
/// The target is a log-domain probability so thresholds like 10^-3000000
/// are valid inputs.  eps must satisfy 0 < eps <= 1.
double erfc_inv(LogProb eps);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

/// log2 of binomial(n, k); requires 0 <= k <= n.
double log2_binom(std::int64_t n, std::int64_t k);

/// Streaming log-sum-exp accumulator in the log2 domain.
class Log2Sum {
public:
    void add(double lg2_term) {
        if (lg2_term == -std::numeric_limits<double>::infinity()) return;
        if (empty_) {
            peak_ = lg2_term;
            mantissa_ = 1.0;
            empty_ = false;
        } else if (lg2_term <= peak_) {
            mantissa_ += std::exp2(lg2_term - peak_);
        } else {
            mantissa_ = mantissa_ * std::exp2(peak_ - lg2_term) + 1.0;
            peak_ = lg2_term;
        }
    }
    double log2() const {
        if (empty_) return -std::numeric_limits<double>::infinity();
        return peak_ + std::log2(mantissa_);
    }

private:
    bool empty_ = true;
    double peak_ = 0.0;
    double mantissa_ = 0.0;
};

} // namespace lightrng
