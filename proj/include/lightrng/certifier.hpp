#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "lightrng/exact.hpp"
#include "lightrng/logprob.hpp"
#include "lightrng/photon_core.hpp"
#include "lightrng/protocol.hpp"

namespace lightrng {

/// Pass window of the certification test, both as ADC bin indices and as the
/// voltage edges those bins induce: v_minus is the lowest passing voltage,
/// v_plus the highest.
struct CertThresholds {
    std::int64_t i_minus = 0;
    std::int64_t i_plus = 0;
    double v_minus = 0.0;
    double v_plus = 0.0;

    void validate() const;  // v_minus <= v_plus, no NaN (infinities allowed)
};

/// Thresholds from pass-window bin indices on the certification ADC.  The
/// window must consist of interior bins: the two end bins are unbounded and
/// cannot anchor a voltage test.
CertThresholds thresholds_from_bins(std::int64_t i_minus, std::int64_t i_plus,
                                    const AdcSpec& adc_c);

/// Failure-probability decomposition of one certification round, plus the
/// m-round union bound.
struct EpsilonBudget {
    LogProb eps_minus = LogProb::impossible();
    LogProb eps_plus = LogProb::impossible();
    LogProb eps_lambda = LogProb::impossible();
    LogProb eps_fail = LogProb::impossible();   ///< max(eps_minus, eps_plus) + eps_lambda
    LogProb eps_fail_m = LogProb::impossible(); ///< min(1, m * eps_fail)
    std::int64_t m = 0;
};

enum class CertFailure {
    none,
    window_below_noise,   ///< v_minus - lambda_tilde certifies no photons at all
    eps_plus_unattainable,///< the saturation bound cannot meet its budget share
    no_feasible_minimum,  ///< no n_R^- satisfies the eps_minus budget share
    overlapping_windows,  ///< the two tail events are not voltage-disjoint
    empty_range,          ///< solved n_R^- exceeds the preset n_R^+
};

const char* to_string(CertFailure reason);

/// Outcome of certification: the certified photon range at the difference
/// detector, the per-sample min-entropy it implies, and the epsilon budget.
/// A zeroed certificate (n_lo = 0, kappa = 0) carries the failure reason.
struct CertCertificate {
    FockRange certified_range{0, 0};
    double kappa_per_sample = 0.0;
    EpsilonBudget budget;
    double lambda_tilde = 0.0;
    CertFailure failure = CertFailure::none;

    bool ok() const { return failure == CertFailure::none; }
};

/// Noise excursion bound: the voltage lambda_tilde = sqrt(2) sigma_c
/// erfc^-1(eps_lambda) such that Pr[|noise| > lambda_tilde] = eps_lambda.
double lambda_bound(double sigma_c, LogProb eps_lambda);

/// Tail bound on the event "the test passed yet fewer than n_r_minus photons
/// reached the difference detector", for the worst-case source:
///   exp(-2 (n_C^- - r1 u)^2 / u),  u = n_C^- + n_r_minus - 1,
/// with n_C^- = (v_minus - lambda_tilde) / alpha_c.  Throws RegimeError when
/// n_C^- < r1 u (the exponential bound does not apply there).
LogProb epsilon_minus(double v_minus, double lambda_tilde, double alpha_c, double r1,
                      std::int64_t n_r_minus);

/// Mirrored tail bound on "the test passed yet more than n_r_plus photons
/// reached the difference detector":
///   exp(-2 (n_r_plus - (1-r1) u)^2 / u),  u = n_C^+ + n_r_plus + 1,
/// with n_C^+ = (v_plus + lambda_tilde) / alpha_c (the conservative form that
/// enlarges the pass window by the noise bound).
LogProb epsilon_plus(double v_plus, double lambda_tilde, double alpha_c, double r1,
                     std::int64_t n_r_plus);

/// Voltage-disjointness condition of the two tail events:
///   lambda_tilde <= v_plus - alpha_c (n_r_plus - n_r_minus + 1).
/// Certification refuses to emit a certificate when this is false.
bool disjointness_check(double lambda_tilde, double v_plus, double alpha_c,
                        std::int64_t n_r_minus, std::int64_t n_r_plus);

/// Largest integer n_R^- whose epsilon_minus stays within target, found by
/// monotone integer bisection on the valid regime branch with both neighbours
/// verified.  Returns 0 when no positive solution exists (no min-entropy can
/// be assigned).
std::int64_t solve_n_r_minus(LogProb target_eps_minus, double v_minus, double lambda_tilde,
                             double alpha_c, double r1);

/// Assembles a certificate: splits the failure budget (lambda_split to the
/// noise bound, the rest to each tail), fixes lambda_tilde, verifies the
/// saturation tail and disjointness, solves for n_R^-, and converts the
/// certified range into per-sample min-entropy over the difference ADC's
/// support set.  Any failed sub-check yields a zeroed certificate with a
/// machine-readable reason.
CertCertificate certify(const ProtocolParams& params, const CertThresholds& thresholds,
                        LogProb target_eps_fail, std::int64_t m, double lambda_split = 0.5);

/// Probability that an honest coherent input of amplitude alpha_amp fails the
/// certification test: photon number Poisson(|alpha_amp|^2) thinned by r1,
/// smeared by the detector noise.  Exact Poisson summation for mean thinned
/// photon numbers up to 1e3, Gaussian approximation above.
double completeness_coherent(double alpha_amp, const CertThresholds& thresholds,
                             const ProtocolParams& params);

/// Exact-rational consistency check of the failure probability's two faces on
/// an ideal small instance (Fock input n_e, unit conversion, no noise): the
/// joint probability of "test passes and the photon count at the difference
/// detector leaves n_range", versus p_pass times the trace distance between
/// the conditional passed state and its clipped-to-range counterpart.  The
/// pass window is the photon-count interval [c_lo, c_hi] at the certification
/// detector.  Both routes are computed independently and returned for
/// equality assertion.
std::pair<exact::BigRat, exact::BigRat> trace_distance_identity(std::int64_t n_e,
                                                                const exact::BigRat& r1,
                                                                std::int64_t c_lo,
                                                                std::int64_t c_hi,
                                                                FockRange n_range);

} // namespace lightrng
