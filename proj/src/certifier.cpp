#include "lightrng/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "lightrng/errors.hpp"
#include "lightrng/specfun.hpp"

namespace lightrng {

void ProtocolParams::validate() const {
    if (r0 != 0.5)
        throw ContractError("ProtocolParams: the randomness splitter must be balanced (r0 = 1/2)");
    if (!(r1 > 0.0 && r1 < 1.0)) throw ContractError("ProtocolParams: r1 must lie in (0,1)");
    detector_c.validate();
    detector_diff.validate();
    adc_c.validate();
    adc_d.validate();
    if (n_r_plus < 1) throw ContractError("ProtocolParams: saturation photon number must be positive");
}

void CertThresholds::validate() const {
    if (std::isnan(v_minus) || std::isnan(v_plus) || !(v_minus <= v_plus))
        throw ContractError("CertThresholds: need v_minus <= v_plus");
    if (i_minus > i_plus) throw ContractError("CertThresholds: need i_minus <= i_plus");
}

CertThresholds thresholds_from_bins(std::int64_t i_minus, std::int64_t i_plus,
                                    const AdcSpec& adc_c) {
    if (i_minus > i_plus) throw ContractError("thresholds_from_bins: need i_minus <= i_plus");
    const VoltageBin lo = bin_by_index(i_minus, adc_c);
    const VoltageBin hi = bin_by_index(i_plus, adc_c);
    if (!std::isfinite(lo.v_lo) || !std::isfinite(hi.v_hi))
        throw ContractError("thresholds_from_bins: the window may not include the unbounded end bins");
    CertThresholds t;
    t.i_minus = i_minus;
    t.i_plus = i_plus;
    t.v_minus = lo.v_lo;
    t.v_plus = hi.v_hi;
    return t;
}

const char* to_string(CertFailure reason) {
    switch (reason) {
        case CertFailure::none: return "none";
        case CertFailure::window_below_noise: return "window_below_noise";
        case CertFailure::eps_plus_unattainable: return "eps_plus_unattainable";
        case CertFailure::no_feasible_minimum: return "no_feasible_minimum";
        case CertFailure::overlapping_windows: return "overlapping_windows";
        case CertFailure::empty_range: return "empty_range";
    }
    return "unknown";
}

double lambda_bound(double sigma_c, LogProb eps_lambda) {
    if (!(sigma_c >= 0.0)) throw ContractError("lambda_bound: noise sigma must be >= 0");
    if (eps_lambda.is_impossible())
        throw ContractError("lambda_bound: a zero-probability excursion bound is unattainable");
    return std::sqrt(2.0) * sigma_c * erfc_inv(eps_lambda);
}

namespace {

void check_optics(double alpha_c, double r1, const char* who) {
    if (!(alpha_c > 0.0)) throw ContractError(std::string(who) + ": conversion factor must be positive");
    if (!(r1 > 0.0 && r1 < 1.0)) throw ContractError(std::string(who) + ": r1 must lie in (0,1)");
}

} // namespace

LogProb epsilon_minus(double v_minus, double lambda_tilde, double alpha_c, double r1,
                      std::int64_t n_r_minus) {
    check_optics(alpha_c, r1, "epsilon_minus");
    if (n_r_minus < 1) throw ContractError("epsilon_minus: need n_r_minus >= 1");
    const double n_c_minus = (v_minus - lambda_tilde) / alpha_c;
    if (!(n_c_minus > 0.0))
        throw ContractError("epsilon_minus: the window certifies no photons (n_C^- <= 0)");
    const double u = n_c_minus + double(n_r_minus) - 1.0;
    const double gap = n_c_minus - r1 * u;
    if (gap < 0.0)
        throw RegimeError("epsilon_minus: n_r_minus exceeds the exponential-bound regime");
    return LogProb::from_ln(-2.0 * gap * gap / u);
}

LogProb epsilon_plus(double v_plus, double lambda_tilde, double alpha_c, double r1,
                     std::int64_t n_r_plus) {
    check_optics(alpha_c, r1, "epsilon_plus");
    if (n_r_plus < 1) throw ContractError("epsilon_plus: need n_r_plus >= 1");
    const double n_c_plus = (v_plus + lambda_tilde) / alpha_c;
    if (!(n_c_plus >= 0.0)) throw ContractError("epsilon_plus: negative photon window");
    const double u = n_c_plus + double(n_r_plus) + 1.0;
    const double gap = double(n_r_plus) - (1.0 - r1) * u;
    if (gap < 0.0)
        throw RegimeError("epsilon_plus: n_r_plus is below the exponential-bound regime");
    return LogProb::from_ln(-2.0 * gap * gap / u);
}

bool disjointness_check(double lambda_tilde, double v_plus, double alpha_c,
                        std::int64_t n_r_minus, std::int64_t n_r_plus) {
    return lambda_tilde <= v_plus - alpha_c * double(n_r_plus - n_r_minus + 1);
}

std::int64_t solve_n_r_minus(LogProb target_eps_minus, double v_minus, double lambda_tilde,
                             double alpha_c, double r1) {
    check_optics(alpha_c, r1, "solve_n_r_minus");
    if (target_eps_minus.is_impossible()) return 0;
    const double n_c_minus = (v_minus - lambda_tilde) / alpha_c;
    if (!(n_c_minus > 0.0)) return 0;

    // Largest n with n_C^- - r1 (n_C^- + n - 1) >= 0, float-guarded.
    const double regime_edge = (1.0 - r1) / r1 * n_c_minus + 1.0;
    if (regime_edge > 9.0e18)
        throw ContractError("solve_n_r_minus: regime bound overflows the photon type");
    const auto in_regime = [&](std::int64_t n) {
        return n_c_minus - r1 * (n_c_minus + double(n) - 1.0) >= 0.0;
    };
    std::int64_t hi = static_cast<std::int64_t>(std::floor(regime_edge));
    for (int k = 0; k < 8 && hi >= 1 && !in_regime(hi); ++k) --hi;
    for (int k = 0; k < 8 && in_regime(hi + 1); ++k) ++hi;
    if (hi < 1) return 0;

    const auto eps = [&](std::int64_t n) {
        return epsilon_minus(v_minus, lambda_tilde, alpha_c, r1, n);
    };
    if (eps(1) > target_eps_minus) return 0;
    if (!(eps(hi) > target_eps_minus)) return hi;

    // The bound is non-decreasing in n on the regime branch; bisect the step
    // with the invariant eps(lo) <= target < eps(hi).
    std::int64_t lo = 1;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (eps(mid) > target_eps_minus) hi = mid;
        else lo = mid;
    }
    if (eps(lo) > target_eps_minus || !(eps(lo + 1) > target_eps_minus))
        throw RegimeError("solve_n_r_minus: monotone bracketing failed");
    return lo;
}

CertCertificate certify(const ProtocolParams& params, const CertThresholds& thresholds,
                        LogProb target_eps_fail, std::int64_t m, double lambda_split) {
    params.validate();
    thresholds.validate();
    if (!(std::isfinite(thresholds.v_minus) && std::isfinite(thresholds.v_plus)))
        throw ContractError("certify: thresholds must have finite voltage edges");
    if (m < 1) throw ContractError("certify: need at least one round");
    if (!(lambda_split > 0.0 && lambda_split < 1.0))
        throw ContractError("certify: lambda_split must lie in (0,1)");
    if (target_eps_fail.is_impossible() || target_eps_fail.is_certain())
        throw ContractError("certify: target failure probability must lie in (0,1)");

    const double alpha_c = conversion_factor(params.detector_c);

    const LogProb eps_lambda = LogProb::from_log2(target_eps_fail.log2() + std::log2(lambda_split));
    const LogProb tail_budget =
        LogProb::from_log2(target_eps_fail.log2() + std::log2(1.0 - lambda_split));
    const double lambda_tilde = lambda_bound(params.detector_c.noise_sigma_v, eps_lambda);

    CertCertificate cert;
    cert.lambda_tilde = lambda_tilde;
    cert.certified_range = FockRange{0, params.n_r_plus};
    cert.budget.eps_lambda = eps_lambda;
    cert.budget.m = m;

    const auto zeroed = [&cert](CertFailure reason) {
        cert.failure = reason;
        cert.certified_range.n_lo = 0;
        cert.kappa_per_sample = 0.0;
        return cert;
    };

    if (!((thresholds.v_minus - lambda_tilde) / alpha_c > 0.0))
        return zeroed(CertFailure::window_below_noise);

    try {
        cert.budget.eps_plus =
            epsilon_plus(thresholds.v_plus, lambda_tilde, alpha_c, params.r1, params.n_r_plus);
    } catch (const RegimeError&) {
        return zeroed(CertFailure::eps_plus_unattainable);
    }
    if (cert.budget.eps_plus > tail_budget) return zeroed(CertFailure::eps_plus_unattainable);

    const std::int64_t n_r_minus =
        solve_n_r_minus(tail_budget, thresholds.v_minus, lambda_tilde, alpha_c, params.r1);
    if (n_r_minus == 0) return zeroed(CertFailure::no_feasible_minimum);
    if (n_r_minus > params.n_r_plus) return zeroed(CertFailure::empty_range);
    if (!disjointness_check(lambda_tilde, thresholds.v_plus, alpha_c, n_r_minus, params.n_r_plus))
        return zeroed(CertFailure::overlapping_windows);

    cert.certified_range.n_lo = n_r_minus;
    cert.budget.eps_minus =
        epsilon_minus(thresholds.v_minus, lambda_tilde, alpha_c, params.r1, n_r_minus);
    cert.budget.eps_fail = std::max(cert.budget.eps_minus, cert.budget.eps_plus) + eps_lambda;
    cert.budget.eps_fail_m = cert.budget.eps_fail.scaled(double(m));

    const auto support =
        support_set(effective_resolution(params.adc_d), conversion_factor(params.detector_diff));
    cert.kappa_per_sample = min_entropy_per_sample(n_r_minus, support);
    return cert;
}

double completeness_coherent(double alpha_amp, const CertThresholds& thresholds,
                             const ProtocolParams& params) {
    params.validate();
    thresholds.validate();
    if (!(alpha_amp >= 0.0)) throw ContractError("completeness_coherent: amplitude must be >= 0");

    const double alpha_c = conversion_factor(params.detector_c);
    const double sigma_c = params.detector_c.noise_sigma_v;
    const double mean_c = params.r1 * alpha_amp * alpha_amp;
    const double v_lo = thresholds.v_minus;
    const double v_hi = thresholds.v_plus;

    const auto pass_given_voltage = [&](double vn) {
        if (sigma_c == 0.0) return (v_lo <= vn && vn < v_hi) ? 1.0 : 0.0;
        const double upper = std::isinf(v_hi) ? 1.0 : normal_cdf((v_hi - vn) / sigma_c);
        const double lower = std::isinf(v_lo) ? 0.0 : normal_cdf((v_lo - vn) / sigma_c);
        return upper - lower;
    };

    double p_pass;
    if (mean_c <= 1000.0) {
        // Exact Poisson summation, truncated far beyond any appreciable mass.
        const std::int64_t n_hi =
            static_cast<std::int64_t>(std::ceil(mean_c + 40.0 * std::sqrt(mean_c + 1.0) + 40.0));
        double acc = 0.0;
        double ln_pmf = -mean_c;
        for (std::int64_t n = 0; n <= n_hi; ++n) {
            if (n > 0) ln_pmf += std::log(mean_c) - std::log(double(n));
            acc += std::exp(ln_pmf) * pass_given_voltage(alpha_c * double(n));
        }
        p_pass = acc;
    } else {
        // Gaussian approximation: v_C ~ N(alpha_c mean, alpha_c^2 mean + sigma^2).
        const double mu = alpha_c * mean_c;
        const double s = std::sqrt(alpha_c * alpha_c * mean_c + sigma_c * sigma_c);
        const double upper = std::isinf(v_hi) ? 1.0 : normal_cdf((v_hi - mu) / s);
        const double lower = std::isinf(v_lo) ? 0.0 : normal_cdf((v_lo - mu) / s);
        p_pass = upper - lower;
    }
    return std::clamp(1.0 - p_pass, 0.0, 1.0);
}

std::pair<exact::BigRat, exact::BigRat> trace_distance_identity(std::int64_t n_e,
                                                                const exact::BigRat& r1,
                                                                std::int64_t c_lo,
                                                                std::int64_t c_hi,
                                                                FockRange n_range) {
    if (n_e < 0 || n_e > 64)
        throw ContractError("trace_distance_identity: small instances only (n_e <= 64)");
    if (!(r1 > 0 && r1 < 1)) throw ContractError("trace_distance_identity: r1 must lie in (0,1)");
    using exact::BigRat;
    const BigRat q1 = BigRat(1) - r1;

    BigRat p_pass(0), joint(0);
    std::map<std::int64_t, BigRat> cond;  // photon count at the difference arm -> passed mass
    for (std::int64_t n_c = 0; n_c <= n_e; ++n_c) {
        if (n_c < c_lo || n_c > c_hi) continue;
        const BigRat mass =
            BigRat(exact::binomial(n_e, n_c)) * exact::pow_rat(r1, n_c) * exact::pow_rat(q1, n_e - n_c);
        const std::int64_t n_r = n_e - n_c;
        p_pass += mass;
        cond[n_r] += mass;
        if (!n_range.contains(n_r)) joint += mass;
    }
    if (p_pass == 0) return {BigRat(0), BigRat(0)};
    for (auto& [n, w] : cond) w /= p_pass;

    // Clipped counterpart: keep the in-range mass, dump the deficit on the
    // heaviest in-range outcome (range floor when nothing in range passed).
    std::map<std::int64_t, BigRat> clipped;
    BigRat deficit(0), heaviest_w(-1);
    std::int64_t heaviest = n_range.n_lo;
    for (const auto& [n, w] : cond) {
        if (n_range.contains(n)) {
            clipped[n] = w;
            if (w > heaviest_w) {
                heaviest_w = w;
                heaviest = n;
            }
        } else {
            deficit += w;
        }
    }
    if (deficit != 0) clipped[heaviest] += deficit;

    // Trace distance of diagonal states: half the L1 difference.
    std::set<std::int64_t> support;
    for (const auto& [n, w] : cond) support.insert(n);
    for (const auto& [n, w] : clipped) support.insert(n);
    BigRat l1(0);
    for (std::int64_t n : support) {
        const auto a_it = cond.find(n);
        const auto b_it = clipped.find(n);
        const BigRat a = a_it == cond.end() ? BigRat(0) : a_it->second;
        const BigRat b = b_it == clipped.end() ? BigRat(0) : b_it->second;
        l1 += a >= b ? a - b : b - a;
    }
    return {joint, p_pass * l1 / 2};
}

} // namespace lightrng
