#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lightrng/logprob.hpp"

namespace lightrng {

/// Closed photon-number interval [n_lo, n_hi]; n_hi may be unbounded.
struct FockRange {
    static constexpr std::int64_t unbounded = INT64_MAX;

    std::int64_t n_lo = 0;
    std::int64_t n_hi = unbounded;

    bool contains(std::int64_t n) const { return n >= n_lo && n <= n_hi; }
    bool is_bounded() const { return n_hi != unbounded; }
};

/// Outcome distribution of the ideal 50:50 difference measurement on |n>.
/// Weights are nonzero only for x in [-n, n] with x ≡ n (mod 2).
struct DiffOutcomeDist {
    std::int64_t n = 0;
    std::map<std::int64_t, double> weights;

    double weight(std::int64_t x) const {
        auto it = weights.find(x);
        return it == weights.end() ? 0.0 : it->second;
    }
};

/// Probability that of n_refl+n_trans photons exactly n_refl reflect at a
/// splitter of reflectivity r:  r^{n_refl} (1-r)^{n_trans} C(total, n_refl).
double bs_povm_coeff(std::int64_t n_refl, std::int64_t n_trans, double r);

/// Full difference-outcome distribution on Fock input |n>.
/// Exact-rational evaluation for n <= 64, log-space above.
DiffOutcomeDist diff_outcome_dist(std::int64_t n);

/// Adversarial guessing probability for the difference outcome on |n>
/// against an ADC support set X: the parity-restricted sum of outcome
/// weights over X.  If X is nonempty but contains no parity-matched
/// element, the detector-offset worst case applies and the single central
/// peak weight (x=0 for even n, x=1 for odd) is returned.  Clamped to <= 1.
double guess_prob(std::int64_t n, const std::vector<std::int64_t>& support);

/// Continuity-corrected normal approximation of guess_prob for a symmetric
/// support of half-width hw = floor(delta_V / (2 alpha_D)).  Valid for
/// n >= 1e4; agrees with the exact sum to better than 1e-3 relative there.
double guess_prob_gauss(std::int64_t n, double half_width);

/// Certified min-entropy per sample: -log2 guess_prob(n_R_minus, X).
double min_entropy_per_sample(std::int64_t n_R_minus, const std::vector<std::int64_t>& support);

/// Upper binomial tail  sum_{j=k}^{n} C(n,j) r^j (1-r)^{n-j},
/// summed in log space.  k > n yields the impossible event.
LogProb binom_tail(double r, std::int64_t n, std::int64_t k);

/// Hoeffding bound exp(-2 (k - r n)^2 / n) on the upper binomial tail.
/// Only valid for k >= r n; below that a RegimeError is thrown.
LogProb hoeffding_tail(double r, std::int64_t n, std::int64_t k);

} // namespace lightrng
