#include "lightrng/specfun.hpp"

#include <cmath>

#include "lightrng/errors.hpp"

namespace lightrng {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kLn2 = 0.6931471805599453094;
} // namespace

double ln_erfc(double x) {
    if (std::isnan(x)) throw ContractError("ln_erfc: NaN argument");
    // std::erfc stays above DBL_MIN up to x ~ 26.5; keep a margin.
    if (x <= 25.0) return std::log(std::erfc(x));
    // erfc(x) = e^{-x^2}/(x sqrt(pi)) * S,  S = sum_k (-1)^k (2k-1)!!/(2x^2)^k
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, s = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        s += term;
        if (std::fabs(term) < 1e-19) break;
    }
    return -x * x - std::log(x * kSqrtPi) + std::log(s);
}

double erfc_inv(LogProb eps) {
    if (eps.is_impossible()) throw ContractError("erfc_inv: eps must be positive");
    if (eps.log2() > 0.0) throw ContractError("erfc_inv: eps must be <= 1");
    if (eps.is_certain()) return 0.0;

    const double target = eps.ln(); // < 0
    const double big_l = -target;

    // Seed from erfc(x) ~ e^{-x^2}/(x sqrt(pi)) for small eps, linear for eps near 1.
    double x0;
    if (big_l > 2.0) {
        double x2 = big_l;
        for (int i = 0; i < 3; ++i) x2 = big_l - std::log(std::sqrt(x2) * kSqrtPi);
        x0 = std::sqrt(std::max(x2, 1e-12));
    } else {
        x0 = (1.0 - std::exp(target)) * kSqrtPi / 2.0;
    }

    // f(x) = ln_erfc(x) - target is strictly decreasing, f(0) >= 0.
    double lo = 0.0, hi = x0;
    while (ln_erfc(hi) > target) {
        lo = hi;
        hi = hi > 0.5 ? hi * 2.0 : hi + 0.5;
        if (hi > 1e9) throw ContractError("erfc_inv: bracketing failed");
    }

    double x = std::min(std::max(x0, lo), hi);
    for (int it = 0; it < 80; ++it) {
        const double f = ln_erfc(x) - target;
        if (f >= 0.0) lo = x; else hi = x;
        // d/dx ln erfc = -(2/sqrt(pi)) e^{-x^2} / erfc(x), computed in logs.
        const double ln_slope = std::log(2.0 / kSqrtPi) - x * x - ln_erfc(x);
        const double step = f * std::exp(-ln_slope); // f / |f'|; f' < 0 so move right when f > 0
        double next = x + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - x) <= 1e-15 * (1.0 + std::fabs(x))) return next;
        x = next;
    }
    return x;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ContractError("normal_quantile: p must be in (0, 1)");
    if (p < 0.5) return -std::sqrt(2.0) * erfc_inv(LogProb::from_linear(2.0 * p));
    return std::sqrt(2.0) * erfc_inv(LogProb::from_linear(2.0 * (1.0 - p)));
}

double log2_binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) throw ContractError("log2_binom: need 0 <= k <= n");
    return (std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
            std::lgamma(double(n - k) + 1.0)) /
           kLn2;
}

} // namespace lightrng
