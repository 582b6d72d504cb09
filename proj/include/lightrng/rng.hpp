#pragma once

#include <cstdint>

namespace lightrng {

/// Deterministic counter-based random stream keyed by (seed, round, site).
/// Each draw finalizes key + golden-ratio * counter with the SplitMix64
/// mixer, so streams are reproducible and order-independent: any round/site
/// stream can be regenerated in isolation, which makes parallel execution
/// schedules irrelevant to the output.  Statistical quality is that of
/// SplitMix64 — ample for Monte-Carlo work, not cryptographic.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t round_index, std::uint64_t site_tag);

    static std::uint64_t mix64(std::uint64_t x);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double unit();

    /// Standard normal via Box-Muller on two fresh uniforms per call.
    double gauss();

    /// Poisson(mean): exact CDF inversion over a +-40 sigma window for
    /// mean <= 1e3, rounded-normal approximation above (error far below
    /// statistical resolution at that scale).
    std::int64_t poisson(double mean);

    /// Binomial(n, p): exact CDF inversion for n <= 1e4, rounded-normal with
    /// clamping above.
    std::int64_t binomial(std::int64_t n, double p);

    /// Geometric number of failures before the first success:
    /// Pr[k] = (1-success)^k success.
    std::int64_t geometric(double success);

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace lightrng
