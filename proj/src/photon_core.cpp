#include "lightrng/photon_core.hpp"

#include <cmath>

#include "lightrng/errors.hpp"
#include "lightrng/exact.hpp"
#include "lightrng/specfun.hpp"

namespace lightrng {

namespace {

bool parity_matches(std::int64_t x, std::int64_t n) {
    return ((x % 2) + 2) % 2 == ((n % 2) + 2) % 2;
}

// log2 of the outcome weight <n|X(x)|n> = 2^-n C(n, (n+x)/2); parity assumed checked.
double log2_weight(std::int64_t n, std::int64_t x) {
    if (x < -n || x > n) return -std::numeric_limits<double>::infinity();
    return log2_binom(n, (n + x) / 2) - double(n);
}

} // namespace

double bs_povm_coeff(std::int64_t n_refl, std::int64_t n_trans, double r) {
    if (n_refl < 0 || n_trans < 0) throw ContractError("bs_povm_coeff: negative photon count");
    if (!(r >= 0.0 && r <= 1.0)) throw ContractError("bs_povm_coeff: reflectivity outside [0, 1]");
    if (r == 0.0 && n_refl > 0) return 0.0;
    if (r == 1.0 && n_trans > 0) return 0.0;
    double lg = log2_binom(n_refl + n_trans, n_refl);
    if (n_refl > 0) lg += double(n_refl) * std::log2(r);
    if (n_trans > 0) lg += double(n_trans) * std::log2(1.0 - r);
    return std::exp2(lg);
}

DiffOutcomeDist diff_outcome_dist(std::int64_t n) {
    if (n < 0) throw ContractError("diff_outcome_dist: negative photon count");
    DiffOutcomeDist d;
    d.n = n;
    if (n <= 64) {
        for (const auto& [x, w] : exact::diff_outcome_dist(n))
            d.weights[x] = w.convert_to<double>();
    } else {
        for (std::int64_t k = 0; k <= n; ++k)
            d.weights[2 * k - n] = std::exp2(log2_binom(n, k) - double(n));
    }
    return d;
}

double guess_prob(std::int64_t n, const std::vector<std::int64_t>& support) {
    if (n < 0) throw ContractError("guess_prob: negative photon count");
    if (support.empty()) throw ContractError("guess_prob: empty support");
    if (n <= 64) return exact::guess_prob(n, support).convert_to<double>();
    double sum = 0.0;
    bool matched = false;
    for (std::int64_t x : support) {
        if (!parity_matches(x, n)) continue;
        matched = true;
        sum += std::exp2(log2_weight(n, x));
    }
    if (!matched) sum = std::exp2(log2_weight(n, n % 2 == 0 ? 0 : 1));
    return sum > 1.0 ? 1.0 : sum;
}

double guess_prob_gauss(std::int64_t n, double half_width) {
    if (n <= 0) throw ContractError("guess_prob_gauss: photon count must be positive");
    if (half_width < 0) throw ContractError("guess_prob_gauss: negative half width");
    // Largest parity-matched outcome inside [-hw, hw]; the normal
    // approximation of the parity-restricted sum is the N(0, n) mass of
    // [-(x_p+1), x_p+1] (outcomes step by 2, hence the unit continuity term).
    std::int64_t x_p = static_cast<std::int64_t>(std::floor(half_width));
    if (!parity_matches(x_p, n)) x_p -= 1;
    if (x_p < 0) {
        // Odd n with the support confined to {0}: worst case is the single
        // peak weight at |x| = 1, same asymptotic mass as the even-n peak.
        return std::erf(1.0 / std::sqrt(2.0 * double(n)));
    }
    return std::erf((double(x_p) + 1.0) / std::sqrt(2.0 * double(n)));
}

double min_entropy_per_sample(std::int64_t n_R_minus, const std::vector<std::int64_t>& support) {
    const double p = guess_prob(n_R_minus, support);
    return p >= 1.0 ? 0.0 : -std::log2(p);
}

LogProb binom_tail(double r, std::int64_t n, std::int64_t k) {
    if (n < 0) throw ContractError("binom_tail: negative trial count");
    if (!(r >= 0.0 && r <= 1.0)) throw ContractError("binom_tail: probability outside [0, 1]");
    if (k <= 0) return LogProb::certain();
    if (k > n) return LogProb::impossible();
    if (r == 0.0) return LogProb::impossible();
    if (r == 1.0) return LogProb::certain();
    const double mode = r * double(n + 1);
    Log2Sum acc;
    for (std::int64_t j = k; j <= n; ++j) {
        const double lg = log2_binom(n, j) + double(j) * std::log2(r) +
                          double(n - j) * std::log2(1.0 - r);
        acc.add(lg);
        if (double(j) > mode && lg < acc.log2() - 120.0) break;
    }
    return LogProb::from_log2(acc.log2());
}

LogProb hoeffding_tail(double r, std::int64_t n, std::int64_t k) {
    if (n <= 0) throw ContractError("hoeffding_tail: trial count must be positive");
    if (!(r >= 0.0 && r <= 1.0)) throw ContractError("hoeffding_tail: probability outside [0, 1]");
    const double gap = double(k) - r * double(n);
    if (gap < 0.0) throw RegimeError("hoeffding_tail: threshold below the mean (bound invalid)");
    return LogProb::from_ln(-2.0 * gap * gap / double(n));
}

} // namespace lightrng
