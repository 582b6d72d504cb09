#include "lightrng/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "lightrng/bitvec.hpp"
#include "lightrng/detector_model.hpp"
#include "lightrng/errors.hpp"
#include "lightrng/specfun.hpp"

namespace lightrng {

SourceModel SourceModel::vacuum() {
    return SourceModel{};
}

SourceModel SourceModel::coherent(double mean_n) {
    SourceModel m;
    m.kind = Kind::coherent;
    m.mean_n = mean_n;
    return m;
}

SourceModel SourceModel::thermal(double mean_n) {
    SourceModel m;
    m.kind = Kind::thermal;
    m.mean_n = mean_n;
    return m;
}

SourceModel SourceModel::fock(std::int64_t n) {
    SourceModel m;
    m.kind = Kind::fock;
    m.fock_n = n;
    return m;
}

SourceModel SourceModel::adversarial_fock(std::vector<std::int64_t> schedule) {
    SourceModel m;
    m.kind = Kind::adversarial_fock;
    m.schedule = std::move(schedule);
    return m;
}

void SourceModel::validate(std::int64_t m) const {
    switch (kind) {
    case Kind::vacuum:
        return;
    case Kind::coherent:
    case Kind::thermal:
        if (!(mean_n >= 0.0) || !std::isfinite(mean_n)) {
            throw ContractError("SourceModel: mean_n must be finite and >= 0");
        }
        return;
    case Kind::fock:
        if (fock_n < 0) {
            throw ContractError("SourceModel: fock photon number must be >= 0");
        }
        return;
    case Kind::adversarial_fock:
        if (std::ssize(schedule) < m) {
            throw ContractError("SourceModel: schedule shorter than the round count");
        }
        for (std::int64_t n : schedule) {
            if (n < 0) {
                throw ContractError("SourceModel: scheduled photon numbers must be >= 0");
            }
        }
        return;
    }
    throw ContractError("SourceModel: unknown kind");
}

std::int64_t sample_source(const SourceModel& model, std::int64_t round_index, CounterRng& rng) {
    switch (model.kind) {
    case SourceModel::Kind::vacuum:
        return 0;
    case SourceModel::Kind::coherent:
        return rng.poisson(model.mean_n);
    case SourceModel::Kind::thermal:
        return model.mean_n == 0.0 ? 0 : rng.geometric(1.0 / (model.mean_n + 1.0));
    case SourceModel::Kind::fock:
        return model.fock_n;
    case SourceModel::Kind::adversarial_fock:
        if (round_index < 0 || round_index >= std::ssize(model.schedule)) {
            throw ContractError("sample_source: round index outside the schedule");
        }
        return model.schedule[std::size_t(round_index)];
    }
    throw ContractError("sample_source: unknown source kind");
}

std::pair<std::int64_t, std::int64_t> split_beamsplitter(std::int64_t n, double r,
                                                         CounterRng& rng) {
    const std::int64_t reflected = rng.binomial(n, r);
    return {reflected, n - reflected};
}

namespace {

std::int64_t clamp_to_range(std::int64_t n, const FockRange& range) {
    const std::int64_t hi = range.is_bounded() ? range.n_hi : n;
    return std::clamp(n, range.n_lo, std::max(range.n_lo, hi));
}

} // namespace

std::vector<SampleRecord> run_protocol(const RunConfig& config) {
    if (config.m < 1) {
        throw ContractError("run_protocol: m must be >= 1");
    }
    config.params.validate();
    config.thresholds.validate();
    config.source.validate(config.m);

    const double alpha_d = conversion_factor(config.params.detector_diff);
    const double sigma_c = config.params.detector_c.noise_sigma_v;
    const double sigma_d = config.params.detector_diff.noise_sigma_v;
    const FockRange& diff_range = config.params.detector_diff.linear_range;

    std::vector<SampleRecord> records;
    records.reserve(std::size_t(config.m));
    for (std::int64_t i = 0; i < config.m; ++i) {
        SampleRecord rec;

        CounterRng src_rng(config.rng_seed, std::uint64_t(i), site::source);
        rec.n_e = sample_source(config.source, i, src_rng);

        CounterRng tap_rng(config.rng_seed, std::uint64_t(i), site::tap_split);
        std::tie(rec.n_c, rec.n_r) = split_beamsplitter(rec.n_e, config.params.r1, tap_rng);

        CounterRng cert_rng(config.rng_seed, std::uint64_t(i), site::cert_noise);
        const Detection det_c = detect(rec.n_c, config.params.detector_c, config.params.adc_c,
                                       sigma_c * cert_rng.gauss());
        rec.v_c = det_c.voltage;
        rec.code_c = det_c.bin.index;

        CounterRng bal_rng(config.rng_seed, std::uint64_t(i), site::balanced_split);
        std::tie(rec.n_a, rec.n_b) = split_beamsplitter(rec.n_r, config.params.r0, bal_rng);

        CounterRng diff_rng(config.rng_seed, std::uint64_t(i), site::diff_noise);
        const std::int64_t a = clamp_to_range(rec.n_a, diff_range);
        const std::int64_t b = clamp_to_range(rec.n_b, diff_range);
        rec.v_d = alpha_d * double(a - b) + sigma_d * diff_rng.gauss();
        rec.code_d = bin_of_voltage(rec.v_d, config.params.adc_d).index;

        rec.passed =
            rec.code_c >= config.thresholds.i_minus && rec.code_c <= config.thresholds.i_plus;
        records.push_back(rec);
    }
    return records;
}

double max_bin_mass_gaussian(double mu, double sigma, const AdcSpec& adc) {
    adc.validate();
    if (!std::isfinite(mu) || !(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ContractError("max_bin_mass_gaussian: mu must be finite and sigma >= 0");
    }
    if (sigma == 0.0) {
        return 1.0;
    }
    const std::int64_t lo = lowest_bin_index(adc);
    const std::int64_t hi = lo + bin_count(adc) - 1;
    const std::int64_t centre = bin_of_voltage(mu, adc).index;
    const std::int64_t candidates[] = {centre, std::max(lo, centre - 1),
                                       std::min(hi, centre + 1), lo, hi};
    double best = 0.0;
    for (std::int64_t index : candidates) {
        const VoltageBin bin = bin_by_index(index, adc);
        const double mass =
            normal_cdf((bin.v_hi - mu) / sigma) - normal_cdf((bin.v_lo - mu) / sigma);
        best = std::max(best, mass);
    }
    return best;
}

double empirical_min_entropy(const std::vector<SampleRecord>& records, const AdcSpec& adc_d) {
    adc_d.validate();
    std::map<std::int64_t, std::int64_t> histogram;
    std::int64_t passed = 0;
    for (const SampleRecord& rec : records) {
        if (rec.passed) {
            ++passed;
            ++histogram[rec.code_d];
        }
    }
    if (passed < 100000) {
        throw ContractError("empirical_min_entropy: needs at least 1e5 passed records");
    }
    if (histogram.size() == 1) {
        std::fprintf(stderr,
                     "empirical_min_entropy: degenerate single-bin histogram, returning 0\n");
        return 0.0;
    }

    // Method-of-moments fit on the binned data; each bin is represented by
    // the midpoint of its overlap with the converter range so the unbounded
    // end bins stay finite.
    double mean = 0.0;
    double second = 0.0;
    for (const auto& [index, count] : histogram) {
        const VoltageBin bin = bin_by_index(index, adc_d);
        const double v_lo = std::isinf(bin.v_lo) ? adc_d.v_min : bin.v_lo;
        const double v_hi = std::isinf(bin.v_hi) ? adc_d.v_max : bin.v_hi;
        const double rep = 0.5 * (v_lo + v_hi);
        const double w = double(count) / double(passed);
        mean += w * rep;
        second += w * rep * rep;
    }
    const double variance = std::max(0.0, second - mean * mean);
    return -std::log2(max_bin_mass_gaussian(mean, std::sqrt(variance), adc_d));
}

std::vector<DdCurvePoint> dd_min_entropy_models(const std::vector<double>& power_grid,
                                                const ProtocolParams& params) {
    params.validate();
    const double alpha_d = conversion_factor(params.detector_diff);
    const double sigma_d = params.detector_diff.noise_sigma_v;
    const double h_noise = -std::log2(max_bin_mass_gaussian(0.0, sigma_d, params.adc_d));

    std::vector<DdCurvePoint> curve;
    curve.reserve(power_grid.size());
    for (double mean_n : power_grid) {
        if (!(mean_n >= 0.0) || !std::isfinite(mean_n)) {
            throw ContractError("dd_min_entropy_models: mean photon numbers must be >= 0");
        }
        DdCurvePoint point;
        point.mean_n = mean_n;
        const double sigma_x = std::sqrt(alpha_d * alpha_d * mean_n + sigma_d * sigma_d);
        point.h_dd_x = -std::log2(max_bin_mass_gaussian(0.0, sigma_x, params.adc_d));
        point.h_dd_x_cond = std::max(0.0, point.h_dd_x - h_noise);
        curve.push_back(point);
    }
    return curve;
}

void write_records_csv(const std::string& path, const std::vector<SampleRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("write_records_csv: cannot open " + path);
    }
    out << "n_E,n_C,n_R,n_A,n_B,v_C,v_D,code_C,code_D,passed\n";
    char line[320];
    for (const SampleRecord& rec : records) {
        std::snprintf(line, sizeof line,
                      "%lld,%lld,%lld,%lld,%lld,%.17g,%.17g,%lld,%lld,%d\n",
                      static_cast<long long>(rec.n_e), static_cast<long long>(rec.n_c),
                      static_cast<long long>(rec.n_r), static_cast<long long>(rec.n_a),
                      static_cast<long long>(rec.n_b), rec.v_c, rec.v_d,
                      static_cast<long long>(rec.code_c), static_cast<long long>(rec.code_d),
                      rec.passed ? 1 : 0);
        out << line;
    }
    if (!out.flush()) {
        throw ParseError("write_records_csv: write failed for " + path);
    }
}

std::vector<SampleRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("read_records_csv: cannot open " + path);
    }
    std::vector<SampleRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (first && line.rfind("n_E", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        long long n_e = 0, n_c = 0, n_r = 0, n_a = 0, n_b = 0, code_c = 0, code_d = 0;
        double v_c = 0.0, v_d = 0.0;
        int passed = 0;
        const int got = std::sscanf(line.c_str(), "%lld,%lld,%lld,%lld,%lld,%lg,%lg,%lld,%lld,%d",
                                    &n_e, &n_c, &n_r, &n_a, &n_b, &v_c, &v_d, &code_c, &code_d,
                                    &passed);
        if (got != 10) {
            throw ParseError("read_records_csv: malformed row: " + line);
        }
        records.push_back(SampleRecord{n_e, n_c, n_r, n_a, n_b, v_c, v_d, code_c, code_d,
                                       passed != 0});
    }
    return records;
}

std::vector<std::uint8_t> pack_code_stream(const std::vector<SampleRecord>& records,
                                           const AdcSpec& adc_d, int bits_per_code,
                                           bool passed_only) {
    adc_d.validate();
    const std::int64_t bins = bin_count(adc_d);
    if (bits_per_code < 1 || bits_per_code > 63 || (std::int64_t(1) << bits_per_code) < bins) {
        throw ContractError("pack_code_stream: bits_per_code cannot represent the bin map");
    }
    const std::int64_t lo = lowest_bin_index(adc_d);
    BitVec bits;
    for (const SampleRecord& rec : records) {
        if (passed_only && !rec.passed) {
            continue;
        }
        const std::int64_t code = rec.code_d - lo;
        if (code < 0 || code >= bins) {
            throw ContractError("pack_code_stream: code_d outside the bin map");
        }
        bits.append_bits(std::uint64_t(code), bits_per_code);
    }
    return bits.to_bytes();
}

void write_code_stream(const std::string& path, const std::vector<SampleRecord>& records,
                       const AdcSpec& adc_d, int bits_per_code, bool passed_only) {
    const std::vector<std::uint8_t> bytes =
        pack_code_stream(records, adc_d, bits_per_code, passed_only);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError("write_code_stream: cannot open " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out.flush()) {
        throw ParseError("write_code_stream: write failed for " + path);
    }
}

} // namespace lightrng
