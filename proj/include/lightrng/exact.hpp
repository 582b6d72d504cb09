#pragma once

// Exact integer/rational arithmetic used by the oracle-grade code paths
// (small-n distributions, brute-force tail sums, identity checks).

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lightrng/errors.hpp"

namespace lightrng::exact {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Binomial coefficient; 0 outside 0 <= k <= n.
inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    BigInt acc = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i;
    }
    return acc;
}

inline BigRat pow_rat(const BigRat& base, std::int64_t e) {
    if (e < 0) throw ContractError("pow_rat: negative exponent");
    BigRat acc = 1, b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

/// Splitter coefficient r^{n_refl} (1-r)^{n_trans} C(n_refl+n_trans, n_refl), exactly.
inline BigRat bs_povm_coeff(std::int64_t n_refl, std::int64_t n_trans, const BigRat& r) {
    if (n_refl < 0 || n_trans < 0) throw ContractError("bs_povm_coeff: negative photon count");
    if (r < 0 || r > 1) throw ContractError("bs_povm_coeff: reflectivity outside [0, 1]");
    return pow_rat(r, n_refl) * pow_rat(BigRat(1) - r, n_trans) * BigRat(binomial(n_refl + n_trans, n_refl));
}

/// Ideal 50:50 difference-outcome distribution on |n>, exact weights.
inline std::map<std::int64_t, BigRat> diff_outcome_dist(std::int64_t n) {
    if (n < 0) throw ContractError("diff_outcome_dist: negative photon count");
    std::map<std::int64_t, BigRat> w;
    const BigRat denom = pow_rat(BigRat(2), n);
    for (std::int64_t k = 0; k <= n; ++k) w[2 * k - n] = BigRat(binomial(n, k)) / denom;
    return w;
}

/// Parity-filtered guessing probability, exact; same fallback semantics as
/// the double-precision guess_prob (see photon_core.hpp).
inline BigRat guess_prob(std::int64_t n, const std::vector<std::int64_t>& support) {
    if (support.empty()) throw ContractError("guess_prob: empty support");
    const BigRat denom = pow_rat(BigRat(2), n);
    auto weight = [&](std::int64_t x) -> BigRat {
        if (x < -n || x > n) return 0;
        return BigRat(binomial(n, (n + x) / 2)) / denom;
    };
    BigRat sum = 0;
    bool matched = false;
    for (std::int64_t x : support) {
        if (((x % 2) + 2) % 2 != ((n % 2) + 2) % 2) continue;
        matched = true;
        sum += weight(x);
    }
    if (!matched) sum = weight(n % 2 == 0 ? 0 : 1);
    return sum > 1 ? BigRat(1) : sum;
}

/// Upper binomial tail sum_{j=k}^{n} C(n,j) r^j (1-r)^{n-j}, exact.
inline BigRat binom_tail(const BigRat& r, std::int64_t n, std::int64_t k) {
    if (n < 0) throw ContractError("binom_tail: negative trial count");
    if (k < 0) k = 0;
    if (k > n) return 0;
    BigRat sum = 0;
    for (std::int64_t j = k; j <= n; ++j)
        sum += BigRat(binomial(n, j)) * pow_rat(r, j) * pow_rat(BigRat(1) - r, n - j);
    return sum;
}

} // namespace lightrng::exact
