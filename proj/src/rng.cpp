#include "lightrng/rng.hpp"

#include <algorithm>
#include <cmath>

#include "lightrng/errors.hpp"

namespace lightrng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kPi = 3.141592653589793238462643383279502884;

} // namespace

std::uint64_t CounterRng::mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t round_index, std::uint64_t site_tag)
    : key_(mix64(mix64(mix64(seed) ^ round_index) ^ (site_tag * 0xD1342543DE82EF95ULL))) {}

std::uint64_t CounterRng::next_u64() {
    return mix64(key_ + kGolden * ++counter_);
}

double CounterRng::unit() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::gauss() {
    const double u1 = 1.0 - unit(); // (0, 1], keeps the log finite
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::int64_t CounterRng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw ContractError("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean <= 1000.0) {
        // Exact inversion, enumerating outcomes outward from the mode in
        // decreasing-probability order so the expected walk is O(sigma).
        const double u = unit();
        const auto mode = static_cast<std::int64_t>(std::floor(mean));
        const double ln_pm =
            mode == 0 ? -mean : double(mode) * std::log(mean) - mean - std::lgamma(double(mode) + 1.0);
        std::int64_t k_lo = mode;
        std::int64_t k_hi = mode;
        double p_lo = std::exp(ln_pm);
        double p_hi = p_lo;
        double cum = p_lo;
        if (u < cum) {
            return mode;
        }
        for (;;) {
            const double next_down = k_lo > 0 ? p_lo * double(k_lo) / mean : 0.0;
            const double next_up = p_hi * mean / double(k_hi + 1);
            if (next_down <= 0.0 && next_up <= 0.0) {
                return k_hi; // mass exhausted to double underflow
            }
            if (next_down >= next_up) {
                --k_lo;
                p_lo = next_down;
                cum += p_lo;
                if (u < cum) {
                    return k_lo;
                }
            } else {
                ++k_hi;
                p_hi = next_up;
                cum += p_hi;
                if (u < cum) {
                    return k_hi;
                }
            }
        }
    }
    const double v = std::round(mean + std::sqrt(mean) * gauss());
    return v < 0.0 ? 0 : static_cast<std::int64_t>(v);
}

std::int64_t CounterRng::binomial(std::int64_t n, double p) {
    if (n < 0) {
        throw ContractError("binomial: n must be >= 0");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ContractError("binomial: p must lie in [0, 1]");
    }
    if (n == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return n;
    }
    const double mean = double(n) * p;
    const double sd = std::sqrt(mean * (1.0 - p));
    if (n <= 10000) {
        // Exact inversion with the same mode-outward enumeration as poisson.
        const double u = unit();
        const auto mode = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::floor(double(n + 1) * p)), 0, n);
        const double ln_pm = std::lgamma(double(n) + 1.0) - std::lgamma(double(mode) + 1.0) -
                             std::lgamma(double(n - mode) + 1.0) + double(mode) * std::log(p) +
                             double(n - mode) * std::log1p(-p);
        std::int64_t k_lo = mode;
        std::int64_t k_hi = mode;
        double p_lo = std::exp(ln_pm);
        double p_hi = p_lo;
        double cum = p_lo;
        if (u < cum) {
            return mode;
        }
        for (;;) {
            const double next_down =
                k_lo > 0 ? p_lo * double(k_lo) * (1.0 - p) / (double(n - k_lo + 1) * p) : 0.0;
            const double next_up =
                k_hi < n ? p_hi * double(n - k_hi) * p / (double(k_hi + 1) * (1.0 - p)) : 0.0;
            if (next_down <= 0.0 && next_up <= 0.0) {
                return k_hi;
            }
            if (next_down >= next_up) {
                --k_lo;
                p_lo = next_down;
                cum += p_lo;
                if (u < cum) {
                    return k_lo;
                }
            } else {
                ++k_hi;
                p_hi = next_up;
                cum += p_hi;
                if (u < cum) {
                    return k_hi;
                }
            }
        }
    }
    const double v = std::round(mean + sd * gauss());
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, n);
}

std::int64_t CounterRng::geometric(double success) {
    if (!(success > 0.0 && success <= 1.0)) {
        throw ContractError("geometric: success probability must lie in (0, 1]");
    }
    if (success == 1.0) {
        return 0;
    }
    const double u = unit();
    return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-success)));
}

} // namespace lightrng
