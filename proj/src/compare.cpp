#include "lightrng/compare.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "lightrng/certifier.hpp"
#include "lightrng/errors.hpp"
#include "lightrng/specfun.hpp"

namespace lightrng {

namespace {

constexpr double kPi = std::numbers::pi;

/// Direct theta series 1 + 2 sum_{n>=1} tau^{n^2}, truncated once a term
/// drops below 1e-18.  Only called where it converges in a handful of terms
/// (tau <= 0.6, or the modular-transformed nome).
double theta3_series(double tau) {
    double sum = 1.0;
    double term = tau;
    double ratio = tau * tau * tau; // tau^{2n+1} at n = 1
    const double tau_sq = tau * tau;
    while (term >= 1e-18) {
        sum += 2.0 * term;
        term *= ratio;
        ratio *= tau_sq;
    }
    return sum;
}

/// theta3 of the nome exp(-x), x > 0, keeping the exponent exact.  Callers
/// that already know x (rather than the nome) must come through here: forming
/// exp(-x) and taking the log back loses ~x/eps digits when the nome
/// approaches 1.
double theta3_from_exponent(double x) {
    if (x >= -std::log(0.6)) {
        return theta3_series(std::exp(-x));
    }
    return std::sqrt(kPi / x) * theta3_series(std::exp(-kPi * kPi / x));
}

void require_mean(double mean_n, const char* where) {
    if (!(mean_n >= 0.0) || !std::isfinite(mean_n)) {
        throw ContractError(std::string(where) + ": mean photon number must be finite and >= 0");
    }
}

} // namespace

void HomodyneConfig::validate() const {
    if (!(n_lo > 0.0) || !std::isfinite(n_lo)) {
        throw ContractError("HomodyneConfig: local-oscillator photon number must be positive");
    }
    if (!(p_x >= 0.0 && p_x <= 1.0)) {
        throw ContractError("HomodyneConfig: randomness-round probability must lie in [0, 1]");
    }
}

void SdiParams::validate() const {
    if (!(r1 > 0.0 && r1 < 1.0)) {
        throw ContractError("SdiParams: tap reflectivity must lie in (0, 1)");
    }
    if (!(target_pass > 0.0 && target_pass < 1.0)) {
        throw ContractError("SdiParams: target pass probability must lie in (0, 1)");
    }
    if (eps_fail.is_impossible() || !(eps_fail.log2() < 0.0)) {
        throw ContractError("SdiParams: tail budget must lie strictly between 0 and 1");
    }
}

std::string_view to_string(RateModel model) {
    switch (model) {
    case RateModel::dd_vac: return "dd_vac";
    case RateModel::dd_coh: return "dd_coh";
    case RateModel::dd_therm: return "dd_therm";
    case RateModel::eur_coh: return "eur_coh";
    case RateModel::eur_therm: return "eur_therm";
    case RateModel::sdi_coh: return "sdi_coh";
    case RateModel::sdi_therm: return "sdi_therm";
    }
    throw ContractError("to_string: unknown rate model");
}

RateModel rate_model_from_string(std::string_view tag) {
    for (RateModel model : {RateModel::dd_vac, RateModel::dd_coh, RateModel::dd_therm,
                            RateModel::eur_coh, RateModel::eur_therm, RateModel::sdi_coh,
                            RateModel::sdi_therm}) {
        if (tag == to_string(model)) {
            return model;
        }
    }
    throw ParseError("unknown rate model tag '" + std::string(tag) + "'");
}

double dd_vacuum(const HomodyneConfig& cfg) {
    cfg.validate();
    return 0.5 * std::log2(2.0 * kPi * cfg.n_lo);
}

double dd_coherent(double n_s, const HomodyneConfig& cfg) {
    cfg.validate();
    require_mean(n_s, "dd_coherent");
    return 0.5 * std::log2(2.0 * kPi * (n_s + cfg.n_lo));
}

double dd_thermal(double mean_n, const HomodyneConfig& cfg) {
    cfg.validate();
    require_mean(mean_n, "dd_thermal");
    const double squeeze = 1.0 / std::cosh(2.0 * std::asinh(std::sqrt(mean_n)));
    return 0.5 * std::log2(2.0 * kPi * (cfg.n_lo * squeeze + mean_n));
}

double jacobi_theta3(double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw ContractError("jacobi_theta3: nome must lie in [0, 1)");
    }
    if (tau <= 0.6) {
        return theta3_series(tau);
    }
    return theta3_from_exponent(-std::log(tau));
}

double eur_variance_coherent(double mean_n, const HomodyneConfig& cfg) {
    cfg.validate();
    require_mean(mean_n, "eur_variance_coherent");
    return 1.0 + mean_n / cfg.n_lo;
}

double eur_variance_thermal(double mean_n, const HomodyneConfig& cfg) {
    cfg.validate();
    require_mean(mean_n, "eur_variance_thermal");
    return 1.0 / (2.0 * mean_n + 1.0) + mean_n / cfg.n_lo;
}

double eur_rate(double variance, const HomodyneConfig& cfg) {
    cfg.validate();
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw ContractError("eur_rate: variance must be finite and positive");
    }
    const double scaled = cfg.n_lo * variance;
    const double theta = theta3_from_exponent(1.0 / (4.0 * scaled));
    const double rate = cfg.p_x * (std::log2(2.0 * kPi * cfg.n_lo) -
                                   std::log2(theta * theta / std::sqrt(2.0 * kPi * scaled)));
    return std::max(0.0, rate);
}

SdiSolution sdi_expected_detail(double mean_n, CompareSource kind, const SdiParams& sdi) {
    sdi.validate();
    require_mean(mean_n, "sdi_expected");

    SdiSolution out;
    const double mean_c = sdi.r1 * mean_n;
    if (!(mean_c > 0.0)) {
        return out;
    }

    double threshold = 0.0;
    if (kind == CompareSource::coherent) {
        threshold = mean_c - normal_quantile(sdi.target_pass) * std::sqrt(mean_c);
    } else {
        // Geometric tail (q = mean/(mean+1)) inverted in closed form.
        const double log_q = std::log(mean_c / (mean_c + 1.0));
        threshold = 1.0 + std::log(sdi.target_pass) / log_q;
    }
    threshold = std::floor(threshold);
    if (threshold < 1.0) {
        return out;
    }
    out.n_c_minus = threshold;

    // Count-domain instance of the certifier's tail solve: unit conversion
    // factor and no noise excursion, so "voltage" v_minus is the photon
    // count threshold itself.
    out.n_r_minus = solve_n_r_minus(sdi.eps_fail, threshold, 0.0, 1.0, sdi.r1);
    if (out.n_r_minus < 1) {
        out.n_r_minus = 0;
        return out;
    }
    out.solvable = true;
    out.bits = std::max(0.0, sdi.target_pass * 0.5 *
                                 std::log2(kPi * double(out.n_r_minus) / 2.0));
    return out;
}

double sdi_expected(double mean_n, CompareSource kind, const SdiParams& sdi) {
    return sdi_expected_detail(mean_n, kind, sdi).bits;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw ContractError("log_grid: need 0 < lo <= hi, both finite");
    }
    if (points < 1) {
        throw ContractError("log_grid: need at least one point");
    }
    std::vector<double> grid;
    grid.reserve(std::size_t(points));
    if (points == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double step = std::log(hi / lo) / double(points - 1);
    for (int i = 0; i < points; ++i) {
        grid.push_back(lo * std::exp(step * double(i)));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

double evaluate_model(RateModel model, double mean_n, const HomodyneConfig& cfg,
                      const SdiParams& sdi) {
    switch (model) {
    case RateModel::dd_vac: return dd_vacuum(cfg);
    case RateModel::dd_coh: return dd_coherent(mean_n, cfg);
    case RateModel::dd_therm: return dd_thermal(mean_n, cfg);
    case RateModel::eur_coh: return eur_rate(eur_variance_coherent(mean_n, cfg), cfg);
    case RateModel::eur_therm: return eur_rate(eur_variance_thermal(mean_n, cfg), cfg);
    case RateModel::sdi_coh: return sdi_expected(mean_n, CompareSource::coherent, sdi);
    case RateModel::sdi_therm: return sdi_expected(mean_n, CompareSource::thermal, sdi);
    }
    throw ContractError("evaluate_model: unknown rate model");
}

std::vector<RateCurvePoint> sweep(const std::vector<RateModel>& models,
                                  const std::vector<double>& grid,
                                  const HomodyneConfig& cfg, const SdiParams& sdi) {
    cfg.validate();
    sdi.validate();
    std::vector<RateCurvePoint> points;
    points.reserve(models.size() * grid.size());
    for (RateModel model : models) {
        for (double mean_n : grid) {
            points.push_back({mean_n, model, evaluate_model(model, mean_n, cfg, sdi)});
        }
    }
    return points;
}

void write_rate_csv(const std::string& path, const std::vector<RateCurvePoint>& points) {
    std::ofstream out(path);
    if (!out) {
        throw ContractError("write_rate_csv: cannot open '" + path + "' for writing");
    }
    out << "model,mean_n,bits\n";
    char row[128];
    for (const RateCurvePoint& p : points) {
        std::snprintf(row, sizeof(row), "%s,%.17g,%.17g\n",
                      std::string(to_string(p.model)).c_str(), p.mean_n, p.bits);
        out << row;
    }
    if (!out) {
        throw ContractError("write_rate_csv: write to '" + path + "' failed");
    }
}

std::vector<RateCurvePoint> read_rate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("read_rate_csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "model,mean_n,bits") {
        throw ParseError("read_rate_csv: '" + path + "' lacks the expected header");
    }
    std::vector<RateCurvePoint> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos
                                                       : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw ParseError("read_rate_csv: line " + std::to_string(line_no) +
                             " does not have three columns");
        }
        RateCurvePoint p;
        p.model = rate_model_from_string(line.substr(0, c1));
        try {
            std::size_t used = 0;
            const std::string mean_text = line.substr(c1 + 1, c2 - c1 - 1);
            p.mean_n = std::stod(mean_text, &used);
            if (used != mean_text.size()) {
                throw std::invalid_argument("trailing junk");
            }
            const std::string bits_text = line.substr(c2 + 1);
            p.bits = std::stod(bits_text, &used);
            if (used != bits_text.size()) {
                throw std::invalid_argument("trailing junk");
            }
        } catch (const std::exception&) {
            throw ParseError("read_rate_csv: line " + std::to_string(line_no) +
                             " has a malformed number");
        }
        points.push_back(p);
    }
    return points;
}

} // namespace lightrng
