#pragma once

/// Rate-comparison suite: expected min-entropy per round for device-dependent
/// homodyning, entropic-uncertainty-certified homodyning, and the
/// source-device-independent protocol implemented by the rest of this
/// library, over coherent and thermal sources.  Emits the data behind the
/// rate-versus-photon-number comparison curves.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lightrng/logprob.hpp"

namespace lightrng {

/// Homodyne-side parameters shared by the device-dependent and
/// uncertainty-certified models.
struct HomodyneConfig {
    /// Mean photon number of the local oscillator.  Must be positive.
    double n_lo = 1e7;
    /// Probability that a round is used for randomness generation (the
    /// remainder being check rounds).  Two conventional presets exist in the
    /// literature this models; both are exposed rather than hard-coded.
    double p_x = 0.9;

    void validate() const;
};

inline constexpr double kPxPresetMain = 0.9;
inline constexpr double kPxPresetConservative = 0.1;

/// Identifies one curve of the comparison figure.
enum class RateModel {
    dd_vac,    ///< device-dependent, vacuum input
    dd_coh,    ///< device-dependent, coherent input
    dd_therm,  ///< device-dependent, thermal input
    eur_coh,   ///< uncertainty-relation certified, coherent input
    eur_therm, ///< uncertainty-relation certified, thermal input
    sdi_coh,   ///< this protocol, coherent input
    sdi_therm, ///< this protocol, thermal input
};

std::string_view to_string(RateModel model);

/// Inverse of to_string.  Throws ParseError on an unknown tag.
RateModel rate_model_from_string(std::string_view tag);

/// One evaluated point of one curve.
struct RateCurvePoint {
    double mean_n = 0.0;
    RateModel model = RateModel::dd_vac;
    double bits = 0.0; ///< min-entropy per round, always >= 0 after clamping
};

/// Device-dependent min-entropy of an ideal homodyne measurement of vacuum:
/// (1/2) log2(2 pi n_LO).
double dd_vacuum(const HomodyneConfig& cfg);

/// Device-dependent min-entropy with a coherent signal of mean photon number
/// n_s added to the local oscillator: (1/2) log2(2 pi (n_s + n_LO)).
double dd_coherent(double n_s, const HomodyneConfig& cfg);

/// Device-dependent upper bound with a thermal signal: the conditional
/// quadrature variance of a thermal state of mean photon number mean_n is
/// sech(2 asinh(sqrt(mean_n))), giving
/// (1/2) log2(2 pi (n_LO sech(2 asinh(sqrt(mean_n))) + mean_n)).
double dd_thermal(double mean_n, const HomodyneConfig& cfg);

/// Third Jacobi theta function at z = 0 as a function of the nome:
/// sum_{n = -inf}^{inf} tau^{n^2}, for tau in [0, 1).  Evaluated by direct
/// series for small nomes and through the modular transformation
/// theta3(tau) = sqrt(pi / (-ln tau)) theta3(exp(pi^2 / ln tau)) close to 1,
/// where the transformed series converges after one or two terms.
double jacobi_theta3(double tau);

/// Quadrature variance (in vacuum units) entering the uncertainty-certified
/// rate, chosen so that n_LO times the variance reproduces the
/// device-dependent variances above: coherent 1 + mean_n / n_LO, thermal
/// sech-term + mean_n / n_LO.
double eur_variance_coherent(double mean_n, const HomodyneConfig& cfg);
double eur_variance_thermal(double mean_n, const HomodyneConfig& cfg);

/// Uncertainty-relation certified rate for a homodyne measurement whose
/// quadrature variance is `variance` (vacuum units):
///   p_X (log2(2 pi n_LO) - log2(theta3(exp(-1/(4 n_LO V)))^2
///                                / sqrt(2 pi n_LO V))),
/// clamped at zero.
double eur_rate(double variance, const HomodyneConfig& cfg);

/// Source kinds the expected-rate solver understands.
enum class CompareSource { coherent, thermal };

/// Parameters of the expected-rate calculation for this protocol.
struct SdiParams {
    double r1 = 0.0965;             ///< tap reflectivity toward the certification arm
    LogProb eps_fail = LogProb::from_log10(-10.0); ///< per-round tail budget
    double target_pass = 0.995;     ///< design pass probability (completeness)

    void validate() const;
};

/// Outcome of the expected-rate solve at one mean photon number.
struct SdiSolution {
    double n_c_minus = 0.0;      ///< certification threshold in photon counts
    std::int64_t n_r_minus = 0;  ///< certified lower photon count at the difference arm
    double bits = 0.0;           ///< expected min-entropy per round
    bool solvable = false;
};

/// Expected per-round min-entropy of this protocol when the source honestly
/// emits the given state.  The certification threshold n_C^- is placed at the
/// target pass probability (Gaussian quantile for coherent light, geometric
/// tail inverted in closed form for thermal light), the certified count
/// n_R^- is the largest value whose concentration tail stays within
/// eps_fail — found with the same integer bisection the certifier uses,
/// expressed in count units — and the rate is
/// target_pass * (1/2) log2(pi n_R^- / 2), clamped at zero.  Returns an
/// unsolvable record with zero bits when no positive n_R^- exists.
SdiSolution sdi_expected_detail(double mean_n, CompareSource kind, const SdiParams& sdi);

/// Convenience wrapper returning only the bits of sdi_expected_detail.
double sdi_expected(double mean_n, CompareSource kind, const SdiParams& sdi = {});

/// Geometrically spaced grid from lo to hi inclusive (points >= 2), or {lo}
/// for points == 1.  Requires 0 < lo <= hi.
std::vector<double> log_grid(double lo, double hi, int points);

/// Evaluates one model at one mean photon number.
double evaluate_model(RateModel model, double mean_n, const HomodyneConfig& cfg,
                      const SdiParams& sdi);

/// Evaluates every requested model over the grid, model-major, preserving
/// both orders.
std::vector<RateCurvePoint> sweep(const std::vector<RateModel>& models,
                                  const std::vector<double>& grid,
                                  const HomodyneConfig& cfg, const SdiParams& sdi = {});

/// CSV with header "model,mean_n,bits"; one row per point.
void write_rate_csv(const std::string& path, const std::vector<RateCurvePoint>& points);

/// Reads a file produced by write_rate_csv.  Throws ParseError on malformed
/// content, naming the offending line.
std::vector<RateCurvePoint> read_rate_csv(const std::string& path);

} // namespace lightrng
