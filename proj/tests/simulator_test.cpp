#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <vector>

#include "lightrng/certifier.hpp"
#include "lightrng/detector_model.hpp"
#include "lightrng/errors.hpp"
#include "lightrng/photon_core.hpp"
#include "lightrng/rng.hpp"
#include "lightrng/simulator.hpp"
#include "reference_config.hpp"
#include "stats.hpp"

using namespace lightrng;

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments sample_moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) {
        m.mean += x;
    }
    m.mean /= double(xs.size());
    for (double x : xs) {
        m.var += (x - m.mean) * (x - m.mean);
    }
    m.var /= double(xs.size() - 1);
    return m;
}

double poisson_pmf(std::int64_t k, double mean) {
    return std::exp(double(k) * std::log(mean) - mean - std::lgamma(double(k) + 1.0));
}

double binom_pmf(std::int64_t k, std::int64_t n, double p) {
    return std::exp(std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
                    std::lgamma(double(n - k) + 1.0) + double(k) * std::log(p) +
                    double(n - k) * std::log1p(-p));
}

bool same_record(const SampleRecord& a, const SampleRecord& b) {
    return a.n_e == b.n_e && a.n_c == b.n_c && a.n_r == b.n_r && a.n_a == b.n_a &&
           a.n_b == b.n_b && a.v_c == b.v_c && a.v_d == b.v_d && a.code_c == b.code_c &&
           a.code_d == b.code_d && a.passed == b.passed;
}

SampleRecord code_only_record(std::int64_t code_d, bool passed) {
    SampleRecord rec;
    rec.code_d = code_d;
    rec.passed = passed;
    return rec;
}

} // namespace

TEST_CASE("counter rng: keyed, deterministic, order-independent streams") {
    // The mixer is the standard SplitMix64 finalizer; its first output from
    // seed 0 is a published anchor value.
    CHECK(CounterRng::mix64(0) == 0xE220A8397B1DCDAFull);

    CounterRng a(20260814, 5, 2);
    CounterRng b(20260814, 5, 2);
    for (int i = 0; i < 16; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }

    CounterRng base(1, 0, 0);
    CounterRng other_site(1, 0, 1);
    CounterRng other_round(1, 1, 0);
    CounterRng other_seed(2, 0, 0);
    const std::uint64_t first = base.next_u64();
    CHECK(first != other_site.next_u64());
    CHECK(first != other_round.next_u64());
    CHECK(first != other_seed.next_u64());

    CounterRng u(3, 0, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u.unit();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::fabs(sum / 100000.0 - 0.5) < 4.5 * 0.288675 / std::sqrt(100000.0));
}

TEST_CASE("counter rng: gaussian moments and tails") {
    CounterRng rng(17, 0, 0);
    const int n = 200000;
    std::vector<double> zs(n);
    int outside = 0;
    for (double& z : zs) {
        z = rng.gauss();
        if (std::fabs(z) > 1.959964) {
            ++outside;
        }
    }
    const Moments m = sample_moments(zs);
    CHECK(std::fabs(m.mean) < 4.5 / std::sqrt(double(n)));
    CHECK(std::fabs(m.var - 1.0) < 4.5 * std::sqrt(2.0 / double(n)));
    const double tail = double(outside) / double(n);
    CHECK(std::fabs(tail - 0.05) < 4.5 * std::sqrt(0.05 * 0.95 / double(n)));
}

TEST_CASE("poisson sampler: exact branch matches the pmf") {
    CounterRng rng(23, 0, 0);
    const int n = 200000;
    const double mean = 4.0;
    std::vector<double> observed(27, 0.0);
    for (int i = 0; i < n; ++i) {
        const std::int64_t k = rng.poisson(mean);
        REQUIRE(k >= 0);
        observed[std::size_t(std::min<std::int64_t>(k, 26))] += 1.0;
    }
    std::vector<double> expected(27, 0.0);
    double covered = 0.0;
    for (std::int64_t k = 0; k <= 25; ++k) {
        expected[std::size_t(k)] = double(n) * poisson_pmf(k, mean);
        covered += poisson_pmf(k, mean);
    }
    expected[26] = double(n) * std::max(0.0, 1.0 - covered);
    const auto gof = teststats::chi2_goodness_of_fit(observed, expected, 10.0);
    CHECK(gof.p_value >= 0.01);

    CHECK(rng.poisson(0.0) == 0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.poisson(1e-12) == 0);
    }
    CHECK_THROWS_AS(rng.poisson(-1.0), ContractError);
    CHECK_THROWS_AS(rng.poisson(std::nan("")), ContractError);
}

TEST_CASE("poisson sampler: branch crossover and large-mean moments") {
    for (double mean : {999.0, 1001.0}) {
        CounterRng rng(31, std::uint64_t(mean), 0);
        const int n = 100000;
        std::vector<double> xs(n);
        int at_or_below_mean = 0;
        for (double& x : xs) {
            x = double(rng.poisson(mean));
            if (x <= mean) {
                ++at_or_below_mean;
            }
        }
        const Moments m = sample_moments(xs);
        CHECK(std::fabs(m.mean - mean) < 4.5 * std::sqrt(mean / double(n)));
        CHECK(m.var / mean > 0.95);
        CHECK(m.var / mean < 1.05);
        const double cdf_at_mean = double(at_or_below_mean) / double(n);
        CHECK(cdf_at_mean > 0.47);
        CHECK(cdf_at_mean < 0.54);
    }

    CounterRng rng(32, 0, 0);
    const int n = 20000;
    const double mean = 1e7;
    std::vector<double> xs(n);
    for (double& x : xs) {
        x = double(rng.poisson(mean));
    }
    const Moments m = sample_moments(xs);
    CHECK(std::fabs(m.mean - mean) < 4.5 * std::sqrt(mean / double(n)));
    CHECK(m.var / mean > 0.94);
    CHECK(m.var / mean < 1.06);
}

TEST_CASE("binomial sampler: exact pmf, large-n moments, crossover") {
    CounterRng rng(41, 0, 0);
    const int n_draws = 1000000;
    std::vector<double> observed(6, 0.0);
    for (int i = 0; i < n_draws; ++i) {
        const std::int64_t k = rng.binomial(5, 0.5);
        REQUIRE(k >= 0);
        REQUIRE(k <= 5);
        observed[std::size_t(k)] += 1.0;
    }
    std::vector<double> expected(6, 0.0);
    for (std::int64_t k = 0; k <= 5; ++k) {
        expected[std::size_t(k)] = double(n_draws) * binom_pmf(k, 5, 0.5);
    }
    const auto gof = teststats::chi2_goodness_of_fit(observed, expected, 10.0);
    CHECK(gof.p_value >= 0.01);

    {
        // Above the exact-sampling cutoff: mean and variance of the
        // rounded-normal branch against the binomial identities.
        CounterRng big(42, 0, 0);
        const int n = 100000;
        const std::int64_t trials = 1000000;
        const double r = 0.0965;
        std::vector<double> xs(n);
        for (double& x : xs) {
            x = double(big.binomial(trials, r));
        }
        const Moments m = sample_moments(xs);
        const double mean = double(trials) * r;
        const double var = mean * (1.0 - r);
        CHECK(std::fabs(m.mean - mean) < 4.5 * std::sqrt(var / double(n)));
        CHECK(m.var / var > 0.97);
        CHECK(m.var / var < 1.03);
    }

    for (std::int64_t trials : {std::int64_t(10000), std::int64_t(10001)}) {
        CounterRng cross(43, std::uint64_t(trials), 0);
        const int n = 100000;
        const double p = 0.3;
        std::vector<double> xs(n);
        for (double& x : xs) {
            x = double(cross.binomial(trials, p));
        }
        const Moments m = sample_moments(xs);
        const double mean = double(trials) * p;
        const double var = mean * (1.0 - p);
        CHECK(std::fabs(m.mean - mean) < 4.5 * std::sqrt(var / double(n)));
        CHECK(m.var / var > 0.95);
        CHECK(m.var / var < 1.05);
    }

    CounterRng edge(44, 0, 0);
    CHECK(edge.binomial(0, 0.7) == 0);
    CHECK(edge.binomial(9, 0.0) == 0);
    CHECK(edge.binomial(9, 1.0) == 9);
    CHECK_THROWS_AS(edge.binomial(-1, 0.5), ContractError);
    CHECK_THROWS_AS(edge.binomial(5, 1.5), ContractError);
    CHECK_THROWS_AS(edge.binomial(5, std::nan("")), ContractError);
}

TEST_CASE("geometric sampler: thermal photon statistics") {
    CounterRng rng(51, 0, 0);
    const int n = 1000000;
    const double mean = 2.0;
    const double success = 1.0 / (mean + 1.0);
    std::int64_t zeros = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::int64_t k = rng.geometric(success);
        REQUIRE(k >= 0);
        zeros += k == 0 ? 1 : 0;
        sum += double(k);
    }
    const double p0 = double(zeros) / double(n);
    CHECK(std::fabs(p0 - 1.0 / 3.0) < 4.5 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / double(n)));
    const double sd = std::sqrt(mean * (mean + 1.0));
    CHECK(std::fabs(sum / double(n) - mean) < 4.5 * sd / std::sqrt(double(n)));

    CHECK(rng.geometric(1.0) == 0);
    CHECK_THROWS_AS(rng.geometric(0.0), ContractError);
    CHECK_THROWS_AS(rng.geometric(1.5), ContractError);
}

TEST_CASE("source models: deterministic kinds and validation") {
    CounterRng rng(61, 0, 0);
    CHECK(sample_source(SourceModel::vacuum(), 0, rng) == 0);
    CHECK(sample_source(SourceModel::coherent(0.0), 0, rng) == 0);
    CHECK(sample_source(SourceModel::thermal(0.0), 0, rng) == 0);
    CHECK(sample_source(SourceModel::fock(7), 123, rng) == 7);

    const SourceModel adv = SourceModel::adversarial_fock({5, 0, 9});
    CHECK(sample_source(adv, 0, rng) == 5);
    CHECK(sample_source(adv, 1, rng) == 0);
    CHECK(sample_source(adv, 2, rng) == 9);
    CHECK_THROWS_AS(sample_source(adv, 3, rng), ContractError);

    CHECK_THROWS_AS(SourceModel::coherent(-1.0).validate(1), ContractError);
    CHECK_THROWS_AS(SourceModel::fock(-2).validate(1), ContractError);
    CHECK_THROWS_AS(adv.validate(4), ContractError);
    CHECK_NOTHROW(adv.validate(3));
}

TEST_CASE("beamsplitter split: conservation and edge reflectivities") {
    CounterRng rng(71, 0, 0);
    for (double r : {0.1, 0.5, 0.9}) {
        CounterRng z(71, 1, 0);
        const auto [refl, trans] = split_beamsplitter(0, r, z);
        CHECK(refl == 0);
        CHECK(trans == 0);
    }
    for (int i = 0; i < 1000; ++i) {
        const auto [refl, trans] = split_beamsplitter(12345, 0.5, rng);
        CHECK(refl + trans == 12345);
        CHECK(refl >= 0);
        CHECK(trans >= 0);
    }
    CounterRng s1(72, 9, 3);
    CounterRng s2(72, 9, 3);
    CHECK(split_beamsplitter(777, 0.3, s1) == split_beamsplitter(777, 0.3, s2));

    CounterRng e(73, 0, 0);
    CHECK(split_beamsplitter(50, 0.0, e) == std::pair<std::int64_t, std::int64_t>{0, 50});
    CHECK(split_beamsplitter(50, 1.0, e) == std::pair<std::int64_t, std::int64_t>{50, 0});
}

TEST_CASE("run_protocol: structure, conservation, determinism, order independence") {
    RunConfig cfg;
    cfg.m = 600;
    cfg.rng_seed = 20260814;
    cfg.params = refcfg::params();
    cfg.source = SourceModel::coherent(80.0);
    cfg.thresholds = refcfg::thresholds(cfg.params);

    const auto records = run_protocol(cfg);
    REQUIRE(std::ssize(records) == cfg.m);
    for (const SampleRecord& rec : records) {
        CHECK(rec.n_c + rec.n_r == rec.n_e);
        CHECK(rec.n_a + rec.n_b == rec.n_r);
        CHECK(rec.code_c == bin_of_voltage(rec.v_c, cfg.params.adc_c).index);
        CHECK(rec.code_d == bin_of_voltage(rec.v_d, cfg.params.adc_d).index);
        CHECK(rec.passed == (rec.code_c >= cfg.thresholds.i_minus &&
                             rec.code_c <= cfg.thresholds.i_plus));
    }

    const auto again = run_protocol(cfg);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(same_record(records[i], again[i]));
    }

    RunConfig prefix_cfg = cfg;
    prefix_cfg.m = 200;
    const auto prefix = run_protocol(prefix_cfg);
    REQUIRE(std::ssize(prefix) == 200);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        CHECK(same_record(prefix[i], records[i]));
    }

    RunConfig reseeded = cfg;
    reseeded.rng_seed = 999;
    const auto other = run_protocol(reseeded);
    bool any_diff = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
        any_diff = any_diff || !same_record(records[i], other[i]);
    }
    CHECK(any_diff);

    // Recompute one round from scratch using only the keyed streams: no
    // state from earlier rounds is needed, which is what makes execution
    // order irrelevant.
    {
        const std::int64_t k = 137;
        CounterRng src(cfg.rng_seed, std::uint64_t(k), site::source);
        const std::int64_t n_e = sample_source(cfg.source, k, src);
        CounterRng tap(cfg.rng_seed, std::uint64_t(k), site::tap_split);
        const auto [n_c, n_r] = split_beamsplitter(n_e, cfg.params.r1, tap);
        CounterRng cert(cfg.rng_seed, std::uint64_t(k), site::cert_noise);
        const Detection det_c = detect(n_c, cfg.params.detector_c, cfg.params.adc_c,
                                       cfg.params.detector_c.noise_sigma_v * cert.gauss());
        CounterRng bal(cfg.rng_seed, std::uint64_t(k), site::balanced_split);
        const auto [n_a, n_b] = split_beamsplitter(n_r, cfg.params.r0, bal);
        CounterRng diff(cfg.rng_seed, std::uint64_t(k), site::diff_noise);
        const double v_d = conversion_factor(cfg.params.detector_diff) * double(n_a - n_b) +
                           cfg.params.detector_diff.noise_sigma_v * diff.gauss();

        const SampleRecord& rec = records[std::size_t(k)];
        CHECK(rec.n_e == n_e);
        CHECK(rec.n_c == n_c);
        CHECK(rec.n_r == n_r);
        CHECK(rec.n_a == n_a);
        CHECK(rec.n_b == n_b);
        CHECK(rec.v_c == det_c.voltage);
        CHECK(rec.code_c == det_c.bin.index);
        CHECK(rec.v_d == v_d);
        CHECK(rec.code_d == bin_of_voltage(v_d, cfg.params.adc_d).index);
    }

    RunConfig bad = cfg;
    bad.m = 0;
    CHECK_THROWS_AS(run_protocol(bad), ContractError);
    bad.m = 10;
    bad.source = SourceModel::adversarial_fock({1, 2, 3});
    CHECK_THROWS_AS(run_protocol(bad), ContractError);
}

TEST_CASE("run_protocol: vacuum input always fails a positive pass window") {
    RunConfig cfg;
    cfg.m = 2000;
    cfg.rng_seed = 5;
    cfg.params = refcfg::params();
    cfg.source = SourceModel::vacuum();
    cfg.thresholds = refcfg::thresholds(cfg.params);

    for (const SampleRecord& rec : run_protocol(cfg)) {
        CHECK(rec.n_e == 0);
        CHECK(rec.n_r == 0);
        CHECK_FALSE(rec.passed);
    }
}

TEST_CASE("run_protocol: pass fraction tracks the honest-source failure model") {
    RunConfig cfg;
    cfg.m = 200000;
    cfg.rng_seed = 7;
    cfg.params = refcfg::params();
    cfg.source = SourceModel::coherent(refcfg::kMeanPhotons);
    // A deliberately narrow window (about +-1 sigma of the certification
    // voltage) so the predicted failure probability is far from 0 and 1.
    cfg.thresholds = thresholds_from_bins(154, 167, cfg.params.adc_c);

    const double eps_c =
        completeness_coherent(std::sqrt(refcfg::kMeanPhotons), cfg.thresholds, cfg.params);
    const double predicted = 1.0 - eps_c;
    REQUIRE(predicted > 0.3);
    REQUIRE(predicted < 0.97);

    const auto records = run_protocol(cfg);
    std::int64_t passed = 0;
    for (const SampleRecord& rec : records) {
        passed += rec.passed ? 1 : 0;
    }
    const double fraction = double(passed) / double(cfg.m);
    const double sigma = std::sqrt(predicted * (1.0 - predicted) / double(cfg.m));
    CHECK(std::fabs(fraction - predicted) < 4.5 * sigma);
}

TEST_CASE("run_protocol: fock difference codes match the exact outcome law") {
    RunConfig cfg;
    cfg.m = 1000000;
    cfg.rng_seed = 3;
    cfg.params = refcfg::params();
    // A vanishing tap keeps the full photon number headed to the balanced
    // splitter (the chance any round loses a photon here is ~1e-10), and a
    // noiseless difference detector makes the ADC code a deterministic
    // function of the count difference.
    cfg.params.r1 = 1e-12;
    cfg.params.detector_diff.noise_sigma_v = 0.0;
    cfg.source = SourceModel::fock(64);
    cfg.thresholds = refcfg::thresholds(cfg.params);

    const double alpha_d = conversion_factor(cfg.params.detector_diff);
    const DiffOutcomeDist dist = diff_outcome_dist(64);
    std::map<std::int64_t, double> expected_mass;
    for (const auto& [x, w] : dist.weights) {
        const std::int64_t index = bin_of_voltage(alpha_d * double(x), cfg.params.adc_d).index;
        expected_mass[index] += w;
    }

    std::map<std::int64_t, double> observed_count;
    for (const SampleRecord& rec : run_protocol(cfg)) {
        observed_count[rec.code_d] += 1.0;
    }
    for (const auto& [index, count] : observed_count) {
        REQUIRE(expected_mass.count(index) == 1);
    }

    std::vector<double> observed;
    std::vector<double> expected;
    for (const auto& [index, mass] : expected_mass) {
        expected.push_back(double(cfg.m) * mass);
        const auto it = observed_count.find(index);
        observed.push_back(it == observed_count.end() ? 0.0 : it->second);
    }
    const auto gof = teststats::chi2_goodness_of_fit(observed, expected, 15.0);
    CHECK(gof.p_value >= 0.01);
}

TEST_CASE("difference statistics: shot-noise variance and code symmetry") {
    RunConfig cfg;
    cfg.m = 1000000;
    cfg.rng_seed = 11;
    cfg.params = refcfg::params();
    cfg.params.detector_c.noise_sigma_v = 0.0;
    cfg.params.detector_diff.noise_sigma_v = 0.0;
    const double mean_r = 3000.0;
    cfg.source = SourceModel::coherent(mean_r / (1.0 - cfg.params.r1));
    cfg.thresholds = refcfg::thresholds(cfg.params);

    const auto records = run_protocol(cfg);
    double sum_r = 0.0;
    double sum_x = 0.0;
    double sum_x2 = 0.0;
    double sum_idx = 0.0;
    std::int64_t strictly_pos = 0;
    std::int64_t strictly_neg = 0;
    for (const SampleRecord& rec : records) {
        const double x = double(rec.n_a - rec.n_b);
        sum_r += double(rec.n_r);
        sum_x += x;
        sum_x2 += x * x;
        sum_idx += double(rec.code_d);
        strictly_pos += rec.v_d > 0.0 ? 1 : 0;
        strictly_neg += rec.v_d < 0.0 ? 1 : 0;
    }
    const double n = double(cfg.m);
    const double mean_x = sum_x / n;
    const double var_x = sum_x2 / n - mean_x * mean_x;
    const double mean_nr = sum_r / n;
    // For a binomial 50:50 split, Var(n_a - n_b) = E[n_r] exactly, whatever
    // the photon-number distribution of the input.
    CHECK(var_x / mean_nr > 0.99);
    CHECK(var_x / mean_nr < 1.01);

    // Voltage sign symmetry (the x = 0 atom maps to +-0 and is excluded).
    const double signed_total = double(strictly_pos + strictly_neg);
    CHECK(std::fabs(double(strictly_pos - strictly_neg)) < 4.5 * std::sqrt(signed_total));

    // Bin indices pair k <-> -1-k under v -> -v, so the mean index sits at
    // -1/2 up to the small x = 0 atom that always lands in the upper bin.
    CHECK(std::fabs(sum_idx / n + 0.5) < 0.05);
}

TEST_CASE("empirical min entropy: analytic gaussian value and degenerate input") {
    const ProtocolParams params = refcfg::params();
    const double delta_v = effective_resolution(params.adc_d);
    const double sigma = 10.0 * delta_v;

    std::vector<SampleRecord> records;
    CounterRng rng(5, 0, 0);
    for (int i = 0; i < 200000; ++i) {
        SampleRecord rec;
        rec.v_d = sigma * rng.gauss();
        rec.code_d = bin_of_voltage(rec.v_d, params.adc_d).index;
        rec.passed = true;
        records.push_back(rec);
    }
    const double got = empirical_min_entropy(records, params.adc_d);
    const double analytic = -std::log2(delta_v / (sigma * std::sqrt(2.0 * 3.14159265358979324)));
    CHECK(got == doctest::Approx(analytic).epsilon(0.02));

    // Failed records are ignored entirely.
    auto with_junk = records;
    for (int i = 0; i < 50000; ++i) {
        with_junk.push_back(code_only_record(8191, false));
    }
    CHECK(empirical_min_entropy(with_junk, params.adc_d) == got);

    std::vector<SampleRecord> degenerate(120000, code_only_record(3, true));
    CHECK(empirical_min_entropy(degenerate, params.adc_d) == 0.0);

    std::vector<SampleRecord> few(99999, code_only_record(3, true));
    CHECK_THROWS_AS(empirical_min_entropy(few, params.adc_d), ContractError);
}

TEST_CASE("empirical min entropy tracks the device model across powers") {
    const ProtocolParams params = refcfg::params();
    const std::int64_t j_lo = lowest_bin_index(params.adc_c);
    const std::int64_t j_hi = j_lo + bin_count(params.adc_c) - 1;
    const CertThresholds wide = thresholds_from_bins(j_lo + 1, j_hi - 1, params.adc_c);

    for (double mean_r : {1e7, 4e7}) {
        RunConfig cfg;
        cfg.m = 150000;
        cfg.rng_seed = 13;
        cfg.params = params;
        cfg.source = SourceModel::coherent(mean_r / (1.0 - params.r1));
        cfg.thresholds = wide;

        const auto records = run_protocol(cfg);
        const double emp = empirical_min_entropy(records, params.adc_d);
        const double model = dd_min_entropy_models({mean_r}, params)[0].h_dd_x;
        CHECK(emp == doctest::Approx(model).epsilon(0.02));
    }
}

TEST_CASE("device-dependent curves: limits, anchor, monotone regime") {
    const ProtocolParams params = refcfg::params();

    const auto at_zero = dd_min_entropy_models({0.0}, params);
    REQUIRE(at_zero.size() == 1);
    CHECK(at_zero[0].h_dd_x_cond == 0.0);
    CHECK(at_zero[0].h_dd_x > 0.0);

    ProtocolParams noiseless = params;
    noiseless.detector_diff.noise_sigma_v = 0.0;
    const double alpha_d = conversion_factor(params.detector_diff);
    const double delta_v = effective_resolution(params.adc_d);
    const double anchor_n = std::pow(10.0 * delta_v / alpha_d, 2.0);
    const auto anchored = dd_min_entropy_models({anchor_n}, noiseless);
    const double analytic = -std::log2(1.0 / (10.0 * std::sqrt(2.0 * 3.14159265358979324)));
    CHECK(anchored[0].h_dd_x == doctest::Approx(analytic).epsilon(0.01));
    CHECK(anchored[0].h_dd_x_cond == anchored[0].h_dd_x); // sigma_d = 0: no noise entropy

    // With v = 0 exactly on a bin edge (the reference geometry), a tiny but
    // nonzero noise splits its mass evenly across the two adjacent bins, so
    // the noise term tends to exactly one bit as sigma -> 0+ ...
    ProtocolParams tiny_noise = params;
    tiny_noise.detector_diff.noise_sigma_v = 1e-12;
    const auto near = dd_min_entropy_models({anchor_n}, tiny_noise);
    CHECK(near[0].h_dd_x_cond == doctest::Approx(near[0].h_dd_x - 1.0).epsilon(1e-6));

    // ... while for a grid whose bin interior contains 0 the noise term
    // vanishes and the conditional curve recovers the unconditional one.
    ProtocolParams interior = tiny_noise;
    interior.adc_d.v_min += 0.5 * delta_v;
    interior.adc_d.v_max += 0.5 * delta_v;
    const auto rec = dd_min_entropy_models({anchor_n}, interior);
    CHECK(rec[0].h_dd_x_cond == doctest::Approx(rec[0].h_dd_x).epsilon(1e-9));

    const auto curve = dd_min_entropy_models({0.0, 1e3, 1e5, 1e7}, params);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        CHECK(curve[i + 1].h_dd_x > curve[i].h_dd_x);
    }
    for (const DdCurvePoint& point : curve) {
        CHECK(point.h_dd_x_cond >= 0.0);
        CHECK(point.h_dd_x_cond <= point.h_dd_x + 1e-12);
    }

    CHECK_THROWS_AS(dd_min_entropy_models({-1.0}, params), ContractError);
}

TEST_CASE("max bin mass: saturation, off-range means, symmetric bins") {
    const AdcSpec adc = refcfg::params().adc_d;
    const double delta_v = effective_resolution(adc);

    CHECK(max_bin_mass_gaussian(0.0, 0.0, adc) == 1.0);
    CHECK(max_bin_mass_gaussian(1.0, 1e-3, adc) > 0.999999);

    const double huge = max_bin_mass_gaussian(0.0, 100.0 * (adc.v_max - adc.v_min), adc);
    CHECK(huge > 0.49);
    CHECK(huge < 0.5);

    const double centred = max_bin_mass_gaussian(0.0, delta_v, adc);
    CHECK(centred == doctest::Approx(0.3413447).epsilon(1e-5));

    CHECK_THROWS_AS(max_bin_mass_gaussian(std::nan(""), 1.0, adc), ContractError);
    CHECK_THROWS_AS(max_bin_mass_gaussian(0.0, -1.0, adc), ContractError);
}

TEST_CASE("csv round trip and raw code-stream packing") {
    RunConfig cfg;
    cfg.m = 50;
    cfg.rng_seed = 99;
    cfg.params = refcfg::params();
    cfg.source = SourceModel::coherent(12.0);
    cfg.thresholds = refcfg::thresholds(cfg.params);
    const auto records = run_protocol(cfg);

    const std::string path = "/tmp/lightrng_simulator_records.csv";
    write_records_csv(path, records);
    const auto reread = read_records_csv(path);
    REQUIRE(reread.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(same_record(records[i], reread[i]));
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_records_csv("/tmp/lightrng_no_such_file.csv"), ParseError);
    {
        std::ofstream bad("/tmp/lightrng_bad_records.csv");
        bad << "n_E,n_C,n_R,n_A,n_B,v_C,v_D,code_C,code_D,passed\n1,2,3\n";
    }
    CHECK_THROWS_AS(read_records_csv("/tmp/lightrng_bad_records.csv"), ParseError);
    std::remove("/tmp/lightrng_bad_records.csv");

    // Hand-packed stream on a 4-bin converter: codes are bin indices shifted
    // by the lowest index, written MSB-first.
    AdcSpec tiny;
    tiny.bit_depth = 2;
    tiny.enob = 2.0;
    tiny.v_min = -2.0;
    tiny.v_max = 2.0;
    tiny.sample_rate_hz = 1.0;
    REQUIRE(bin_count(tiny) == 4);
    REQUIRE(lowest_bin_index(tiny) == -2);

    const std::vector<SampleRecord> recs = {
        code_only_record(1, true),
        code_only_record(-1, false),
        code_only_record(-2, false),
        code_only_record(0, true),
    };
    const auto all = pack_code_stream(recs, tiny, 2, false);
    REQUIRE(all.size() == 1);
    CHECK(all[0] == 0xD2); // codes 3,1,0,2 -> bits 11 01 00 10
    const auto passed_only = pack_code_stream(recs, tiny, 2, true);
    REQUIRE(passed_only.size() == 1);
    CHECK(passed_only[0] == 0xE0); // codes 3,2 -> bits 11 10, zero padded

    CHECK_THROWS_AS(pack_code_stream(recs, tiny, 1, false), ContractError);
    const std::vector<SampleRecord> out_of_map = {code_only_record(7, true)};
    CHECK_THROWS_AS(pack_code_stream(out_of_map, tiny, 2, false), ContractError);

    // 16-bit codes on the reference difference ADC, big-endian within codes.
    const AdcSpec adc_d = cfg.params.adc_d;
    const std::int64_t lo = lowest_bin_index(adc_d);
    const std::vector<SampleRecord> wide = {
        code_only_record(lo + 5, true),
        code_only_record(lo + 16383, true),
    };
    const auto bytes = pack_code_stream(wide, adc_d, 16, true);
    REQUIRE(bytes.size() == 4);
    CHECK(bytes[0] == 0x00);
    CHECK(bytes[1] == 0x05);
    CHECK(bytes[2] == 0x3F);
    CHECK(bytes[3] == 0xFF);

    const std::string raw_path = "/tmp/lightrng_simulator_codes.bin";
    write_code_stream(raw_path, wide, adc_d, 16, true);
    std::ifstream in(raw_path, std::ios::binary);
    std::vector<char> file_bytes((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    REQUIRE(file_bytes.size() == bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        CHECK(std::uint8_t(file_bytes[i]) == bytes[i]);
    }
    std::remove(raw_path.c_str());
}
