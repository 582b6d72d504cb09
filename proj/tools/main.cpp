// Batch front-end: configuration loading, subcommand dispatch, and file I/O
// for the certification, simulation, extraction, planning, and
// rate-comparison pipelines.  All epsilon values cross the command line and
// the emitted reports in log10 form; every report records the digest of the
// configuration (and data files) it was produced from.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lightrng/certifier.hpp"
#include "lightrng/compare.hpp"
#include "lightrng/config.hpp"
#include "lightrng/detector_model.hpp"
#include "lightrng/errors.hpp"
#include "lightrng/extractor.hpp"
#include "lightrng/rng.hpp"
#include "lightrng/simulator.hpp"

using nlohmann::json;
using namespace lightrng;

namespace {

enum LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };
LogLevel g_log_level = kInfo;

void log_at(LogLevel level, const std::string& message) {
    static const char* names[] = {"debug", "info", "warn", "error"};
    if (level >= g_log_level) {
        std::cerr << "lightrng [" << names[level] << "] " << message << "\n";
    }
}

LogLevel log_level_from_name(const std::string& name) {
    if (name == "debug") return kDebug;
    if (name == "info") return kInfo;
    if (name == "warn") return kWarn;
    if (name == "error") return kError;
    throw ContractError("unknown log level '" + name + "'");
}

json logprob_log10(const LogProb& p) {
    if (p.is_impossible()) {
        return nullptr;
    }
    return p.log10();
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ContractError("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              std::streamsize(bytes.size()));
    if (!out) {
        throw ContractError("write to '" + path + "' failed");
    }
}

std::string file_digest_hex(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_binary_file(path);
    char text[17];
    std::snprintf(text, sizeof(text), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return text;
}

/// Marks keys this subcommand knows about but does not consume, then warns
/// about anything left — misspelled keys must not silently fall back to
/// defaults.
void acknowledge_and_warn(const ConfigFile& cfg, const std::vector<std::string>& known) {
    for (const std::string& key : known) {
        cfg.has(key);
    }
    for (const std::string& key : cfg.unused_keys()) {
        log_at(kWarn, cfg.name() + ": unknown key '" + key + "' ignored");
    }
}

void emit_report(const json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            throw ContractError("cannot open '" + out_path + "' for writing");
        }
        out << text;
        log_at(kInfo, "wrote " + out_path);
    }
}

// ---------------------------------------------------------------------------

struct CertifyOptions {
    std::string config;
    std::string out;
    double eps_fail_log10 = std::nan("");
    double lambda_split = std::nan("");
    std::int64_t rounds = -1;
    double threshold_mv_lo = std::nan("");
    double threshold_mv_hi = std::nan("");
};

int cmd_certify(const CertifyOptions& opt) {
    const ConfigFile cfg = ConfigFile::load(opt.config);
    const ProtocolParams params = load_protocol_params(cfg);

    CertThresholds thresholds;
    const bool has_lo = !std::isnan(opt.threshold_mv_lo);
    const bool has_hi = !std::isnan(opt.threshold_mv_hi);
    if (has_lo != has_hi) {
        throw ContractError("--threshold-mv-lo and --threshold-mv-hi must be given together");
    }
    if (has_lo) {
        const std::int64_t lo = bin_of_voltage(opt.threshold_mv_lo / 1000.0, params.adc_c).index;
        const std::int64_t hi = bin_of_voltage(opt.threshold_mv_hi / 1000.0, params.adc_c).index;
        thresholds = thresholds_from_bins(lo, hi, params.adc_c);
        cfg.has("threshold_bin_lo");
        cfg.has("threshold_bin_hi");
    } else {
        thresholds = load_thresholds(cfg, params);
    }

    const double eps_log10 = !std::isnan(opt.eps_fail_log10)
                                 ? opt.eps_fail_log10
                                 : cfg.get_double_or("eps_fail_log10", -10.0);
    const std::int64_t m = opt.rounds > 0 ? opt.rounds : cfg.get_int("rounds");
    const double split = !std::isnan(opt.lambda_split)
                             ? opt.lambda_split
                             : cfg.get_double_or("lambda_split", 0.5);
    acknowledge_and_warn(cfg, {"source_kind", "source_mean_photons", "source_fock_n",
                               "source_schedule_file", "rng_seed"});

    const CertCertificate cert =
        certify(params, thresholds, LogProb::from_log10(eps_log10), m, split);

    json report;
    report["tool"] = "lightrng certify";
    report["config"] = {{"path", cfg.name()}, {"fnv1a64", cfg.digest_hex()}};
    report["rounds"] = m;
    report["lambda_split"] = split;
    report["target_eps_fail_log10"] = eps_log10;
    report["thresholds"] = {{"bin_lo", thresholds.i_minus},
                            {"bin_hi", thresholds.i_plus},
                            {"v_minus_volts", thresholds.v_minus},
                            {"v_plus_volts", thresholds.v_plus}};
    json body;
    body["ok"] = cert.ok();
    body["failure"] = std::string(to_string(cert.failure));
    body["certified_n_lo"] = cert.certified_range.n_lo;
    if (cert.certified_range.is_bounded()) {
        body["certified_n_hi"] = cert.certified_range.n_hi;
    } else {
        body["certified_n_hi"] = nullptr;
    }
    body["kappa_per_sample"] = cert.kappa_per_sample;
    body["kappa_total"] = cert.kappa_per_sample * double(m);
    body["lambda_tilde_volts"] = cert.lambda_tilde;
    body["eps_minus_log10"] = logprob_log10(cert.budget.eps_minus);
    body["eps_plus_log10"] = logprob_log10(cert.budget.eps_plus);
    body["eps_lambda_log10"] = logprob_log10(cert.budget.eps_lambda);
    body["eps_fail_log10"] = logprob_log10(cert.budget.eps_fail);
    body["eps_fail_m_log10"] = logprob_log10(cert.budget.eps_fail_m);
    report["certificate"] = body;

    emit_report(report, opt.out);
    if (!cert.ok()) {
        log_at(kError, "certificate is zeroed: " + std::string(to_string(cert.failure)));
        return 1;
    }
    log_at(kInfo, "certified " + std::to_string(cert.kappa_per_sample) + " bits/sample");
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string config;
    std::string out;
    std::string raw_out;
    std::string report_out;
    std::int64_t rounds = -1;
    std::int64_t seed = -1;
    int bits_per_code = 0;
};

int cmd_simulate(const SimulateOptions& opt) {
    const ConfigFile cfg = ConfigFile::load(opt.config);
    RunConfig run = load_run_config(cfg);
    if (opt.rounds > 0) {
        run.m = opt.rounds;
    }
    if (opt.seed >= 0) {
        run.rng_seed = static_cast<std::uint64_t>(opt.seed);
    }
    acknowledge_and_warn(cfg, {"eps_fail_log10", "lambda_split"});

    const std::vector<SampleRecord> records = run_protocol(run);
    std::int64_t passed = 0;
    for (const SampleRecord& r : records) {
        passed += r.passed ? 1 : 0;
    }
    write_records_csv(opt.out, records);

    json report;
    report["tool"] = "lightrng simulate";
    report["config"] = {{"path", cfg.name()}, {"fnv1a64", cfg.digest_hex()}};
    report["rounds"] = run.m;
    report["rng_seed"] = run.rng_seed;
    report["passed"] = passed;
    report["pass_fraction"] = run.m > 0 ? double(passed) / double(run.m) : 0.0;
    report["records_csv"] = {{"path", opt.out}, {"fnv1a64", file_digest_hex(opt.out)}};
    if (!opt.raw_out.empty()) {
        const int bits = opt.bits_per_code > 0 ? opt.bits_per_code
                                               : run.params.adc_d.bit_depth;
        write_code_stream(opt.raw_out, records, run.params.adc_d, bits, true);
        report["raw_stream"] = {{"path", opt.raw_out},
                                {"bits_per_code", bits},
                                {"samples", passed},
                                {"fnv1a64", file_digest_hex(opt.raw_out)}};
    }
    emit_report(report, opt.report_out);
    return 0;
}

// ---------------------------------------------------------------------------

struct PlanOptions {
    double kappa = 0.0;
    std::int64_t samples_per_block = 0;
    std::int64_t bits_per_sample = 0;
    std::int64_t strings = 1;
    std::int64_t step_bits = 0;
    std::int64_t out_bits = -1;
    double eps_hash_log10 = std::nan("");
    double eps_fail_log10 = std::nan("");
    double rate_hash = 0.0;
    double rate_data = 0.0;
    double eps_c = 0.0;
    std::string emit_seed;
    std::int64_t seed = 0;
    std::string out;
};

PlanRequest request_from_options(const PlanOptions& opt) {
    PlanRequest req;
    req.kappa = opt.kappa;
    req.m = opt.samples_per_block;
    req.b = opt.bits_per_sample;
    req.t = opt.strings;
    req.k = opt.step_bits;
    if (opt.out_bits >= 0) {
        req.l = opt.out_bits;
    }
    if (!std::isnan(opt.eps_hash_log10)) {
        req.eps_hash_target = LogProb::from_log10(opt.eps_hash_log10);
    }
    req.eps_fail = std::isnan(opt.eps_fail_log10)
                       ? LogProb::impossible()
                       : LogProb::from_log10(opt.eps_fail_log10);
    req.R_hash = opt.rate_hash;
    req.R_data = opt.rate_data;
    req.eps_c = opt.eps_c;
    return req;
}

json plan_to_json(const HashPlan& p) {
    json body;
    body["h"] = p.h;
    body["l"] = p.l;
    body["m"] = p.m;
    body["b"] = p.b;
    body["k"] = p.k;
    body["t"] = p.t;
    body["kappa"] = p.kappa;
    body["eps_hash_log10"] = logprob_log10(p.eps_hash);
    body["eps_fail_m_log10"] = logprob_log10(p.eps_fail_m);
    body["eps_l_log10"] = logprob_log10(p.eps_l);
    body["eps_total_log10"] = logprob_log10(p.eps_total);
    body["compression_ratio"] = p.r;
    body["rate_hash_per_s"] = p.R_hash;
    body["rate_data_per_s"] = p.R_data;
    body["rate_hash_limited_bits_per_s"] = p.R_h;
    body["rate_data_limited_bits_per_s"] = p.R_d;
    body["rate_avg_bits_per_s"] = p.R_avg;
    return body;
}

int cmd_plan(const PlanOptions& opt) {
    const HashPlan p = plan(request_from_options(opt));
    json report;
    report["tool"] = "lightrng plan";
    report["plan"] = plan_to_json(p);
    if (!opt.emit_seed.empty()) {
        CounterRng rng(static_cast<std::uint64_t>(opt.seed), 0, 0);
        const ToeplitzSeed seed = random_seed(p.h, p.l, rng);
        write_seed_file(opt.emit_seed, seed);
        report["seed_file"] = {{"path", opt.emit_seed},
                               {"h", seed.h},
                               {"l", seed.l},
                               {"rng_seed", opt.seed},
                               {"fnv1a64", file_digest_hex(opt.emit_seed)}};
        log_at(kInfo, "wrote seed file " + opt.emit_seed);
    }
    emit_report(report, opt.out);
    return 0;
}

// ---------------------------------------------------------------------------

struct ExtractOptions {
    std::string in;
    std::string out;
    std::string seed_file;
    std::string report_out;
    double kappa = 0.0;
    std::int64_t samples_per_block = 0;
    std::int64_t bits_per_sample = 0;
    std::int64_t strings = 1;
    std::int64_t step_bits = 0;
    double eps_fail_log10 = std::nan("");
    double rate_hash = 0.0;
    double rate_data = 0.0;
    double eps_c = 0.0;
    bool smoke = false;
};

int cmd_extract(const ExtractOptions& opt) {
    const ToeplitzSeed seed = read_seed_file(opt.seed_file);
    PlanOptions plan_opt;
    plan_opt.kappa = opt.kappa;
    plan_opt.samples_per_block = opt.samples_per_block;
    plan_opt.bits_per_sample = opt.bits_per_sample;
    plan_opt.strings = opt.strings;
    plan_opt.step_bits = opt.step_bits;
    plan_opt.out_bits = seed.l; // the seed fixes the output geometry
    plan_opt.eps_fail_log10 = opt.eps_fail_log10;
    plan_opt.rate_hash = opt.rate_hash;
    plan_opt.rate_data = opt.rate_data;
    plan_opt.eps_c = opt.eps_c;
    const HashPlan p = plan(request_from_options(plan_opt));
    if (p.h != seed.h) {
        throw ContractError("seed file block size h = " + std::to_string(seed.h) +
                            " does not match the plan's h = " + std::to_string(p.h));
    }

    const std::vector<std::uint8_t> input = read_binary_file(opt.in);
    const ExtractResult result = extract_stream(p, seed, input);
    write_binary_file(opt.out, result.bytes);

    json report;
    report["tool"] = "lightrng extract";
    report["plan"] = plan_to_json(p);
    report["input"] = {{"path", opt.in},
                       {"bytes", input.size()},
                       {"fnv1a64", file_digest_hex(opt.in)}};
    report["seed_file"] = {{"path", opt.seed_file}, {"fnv1a64", file_digest_hex(opt.seed_file)}};
    report["output"] = {{"path", opt.out},
                        {"bytes", result.bytes.size()},
                        {"fnv1a64", file_digest_hex(opt.out)}};
    json run;
    run["blocks"] = result.report.blocks;
    run["strings"] = result.report.strings;
    run["bits_in"] = result.report.bits_in;
    run["bits_out"] = result.report.bits_out;
    run["discarded_bits"] = result.report.discarded_bits;
    run["seconds"] = result.report.seconds;
    run["achieved_bits_per_s"] = result.report.achieved_bits_per_s;
    run["kappa"] = result.report.kappa;
    run["eps_total_log10"] = logprob_log10(result.report.eps_total);
    report["run"] = run;

    bool smoke_ok = true;
    if (opt.smoke) {
        const BitVec bits = BitVec::from_bytes(result.bytes,
                                               std::size_t(result.report.bits_out));
        const SmokeReport smoke = smoke_tests(bits);
        report["smoke"] = {{"bits", smoke.bits},
                           {"p_monobit", smoke.p_monobit},
                           {"p_runs", smoke.p_runs},
                           {"runs_applicable", smoke.runs_applicable},
                           {"pass", smoke.pass}};
        smoke_ok = smoke.pass;
        if (!smoke_ok) {
            log_at(kError, "smoke tests failed on the extracted output");
        }
    }
    emit_report(report, opt.report_out);
    return smoke_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct CompareOptions {
    std::string panel = "coherent";
    std::string out;
    std::string report_out;
    double grid_lo = 1e3;
    double grid_hi = 1e9;
    std::int64_t points = 25;
    double n_lo = 1e7;
    double p_x = 0.9;
    double r1 = 0.0965;
    double eps_fail_log10 = -10.0;
    double target_pass = 0.995;
};

int cmd_compare(const CompareOptions& opt) {
    HomodyneConfig cfg;
    cfg.n_lo = opt.n_lo;
    cfg.p_x = opt.p_x;
    SdiParams sdi;
    sdi.r1 = opt.r1;
    sdi.eps_fail = LogProb::from_log10(opt.eps_fail_log10);
    sdi.target_pass = opt.target_pass;

    std::vector<RateModel> models;
    if (opt.panel == "coherent") {
        models = {RateModel::dd_vac, RateModel::dd_coh, RateModel::eur_coh,
                  RateModel::sdi_coh};
    } else if (opt.panel == "thermal") {
        models = {RateModel::dd_vac, RateModel::dd_therm, RateModel::eur_therm,
                  RateModel::sdi_therm};
    } else {
        throw ContractError("--panel must be 'coherent' or 'thermal'");
    }

    const std::vector<double> grid =
        opt.points == 0 ? std::vector<double>{}
                        : log_grid(opt.grid_lo, opt.grid_hi, int(opt.points));
    const std::vector<RateCurvePoint> points = sweep(models, grid, cfg, sdi);
    write_rate_csv(opt.out, points);

    json report;
    report["tool"] = "lightrng compare";
    report["panel"] = opt.panel;
    report["points"] = points.size();
    report["n_lo"] = opt.n_lo;
    report["p_x"] = opt.p_x;
    report["r1"] = opt.r1;
    report["eps_fail_log10"] = opt.eps_fail_log10;
    report["target_pass"] = opt.target_pass;
    report["csv"] = {{"path", opt.out}, {"fnv1a64", file_digest_hex(opt.out)}};
    emit_report(report, opt.report_out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified quantum random numbers from untrusted light"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "debug|info|warn|error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

    CertifyOptions copt;
    CLI::App* certify = app.add_subcommand(
        "certify", "compute a min-entropy certificate for a pass window");
    certify->add_option("--config", copt.config, "configuration file")->required();
    certify->add_option("--out", copt.out, "certificate JSON path (default: stdout)");
    certify->add_option("--eps-fail-log10", copt.eps_fail_log10,
                        "target failure probability, log10");
    certify->add_option("--rounds", copt.rounds, "rounds the certificate covers");
    certify->add_option("--threshold-mv-lo", copt.threshold_mv_lo,
                        "pass-window lower edge, millivolts");
    certify->add_option("--threshold-mv-hi", copt.threshold_mv_hi,
                        "pass-window upper edge, millivolts");
    certify->add_option("--lambda-split", copt.lambda_split,
                        "fraction of the budget assigned to the noise bound");

    SimulateOptions sopt;
    CLI::App* simulate = app.add_subcommand("simulate", "run the optical chain Monte Carlo");
    simulate->add_option("--config", sopt.config, "configuration file")->required();
    simulate->add_option("--out", sopt.out, "records CSV path")->required();
    simulate->add_option("--raw-out", sopt.raw_out, "packed passed-sample code stream path");
    simulate->add_option("--report", sopt.report_out, "run report JSON path (default: stdout)");
    simulate->add_option("--rounds", sopt.rounds, "override configured round count");
    simulate->add_option("--seed", sopt.seed, "override configured RNG seed");
    simulate->add_option("--bits-per-code", sopt.bits_per_code,
                         "code width in the raw stream (default: ADC bit depth)");

    PlanOptions popt;
    CLI::App* planner = app.add_subcommand("plan", "resolve an extraction plan");
    planner->add_option("--kappa", popt.kappa, "certified bits per block")->required();
    planner->add_option("--samples-per-block", popt.samples_per_block)->required();
    planner->add_option("--bits-per-sample", popt.bits_per_sample)->required();
    planner->add_option("--strings", popt.strings, "blocks per output string");
    planner->add_option("--step-bits", popt.step_bits, "pipeline step width (default: sample width)");
    planner->add_option("--out-bits", popt.out_bits, "output bits per block");
    planner->add_option("--eps-hash-log10", popt.eps_hash_log10,
                        "hashing security target, log10");
    planner->add_option("--eps-fail-log10", popt.eps_fail_log10,
                        "per-sample certification failure, log10");
    planner->add_option("--rate-hash", popt.rate_hash, "hash operations per second");
    planner->add_option("--rate-data", popt.rate_data, "acquired samples per second");
    planner->add_option("--eps-c", popt.eps_c, "honest abort probability");
    planner->add_option("--emit-seed", popt.emit_seed, "write a fresh seed file here");
    planner->add_option("--seed", popt.seed, "RNG seed for --emit-seed");
    planner->add_option("--out", popt.out, "plan JSON path (default: stdout)");

    ExtractOptions eopt;
    CLI::App* extract = app.add_subcommand("extract", "hash a raw sample stream into output bits");
    extract->add_option("--in", eopt.in, "raw sample stream")->required();
    extract->add_option("--out", eopt.out, "output byte file")->required();
    extract->add_option("--seed-file", eopt.seed_file, "Toeplitz seed file")->required();
    extract->add_option("--report", eopt.report_out, "run report JSON path (default: stdout)");
    extract->add_option("--kappa", eopt.kappa, "certified bits per block")->required();
    extract->add_option("--samples-per-block", eopt.samples_per_block)->required();
    extract->add_option("--bits-per-sample", eopt.bits_per_sample)->required();
    extract->add_option("--strings", eopt.strings, "blocks per output string");
    extract->add_option("--step-bits", eopt.step_bits, "pipeline step width");
    extract->add_option("--eps-fail-log10", eopt.eps_fail_log10,
                        "per-sample certification failure, log10");
    extract->add_option("--rate-hash", eopt.rate_hash, "hash operations per second");
    extract->add_option("--rate-data", eopt.rate_data, "acquired samples per second");
    extract->add_option("--eps-c", eopt.eps_c, "honest abort probability");
    extract->add_flag("--smoke", eopt.smoke, "run monobit/runs tests on the output");

    CompareOptions xopt;
    CLI::App* compare = app.add_subcommand("compare", "emit rate-comparison curve data");
    compare->add_option("--panel", xopt.panel, "coherent|thermal")
        ->check(CLI::IsMember({"coherent", "thermal"}));
    compare->add_option("--out", xopt.out, "curve CSV path")->required();
    compare->add_option("--report", xopt.report_out, "report JSON path (default: stdout)");
    compare->add_option("--grid-lo", xopt.grid_lo, "smallest mean photon number");
    compare->add_option("--grid-hi", xopt.grid_hi, "largest mean photon number");
    compare->add_option("--points", xopt.points, "grid size (0 emits only the header)");
    compare->add_option("--n-lo", xopt.n_lo, "local-oscillator photon number");
    compare->add_option("--p-x", xopt.p_x, "randomness-round probability");
    compare->add_option("--r1", xopt.r1, "certification tap reflectivity");
    compare->add_option("--eps-fail-log10", xopt.eps_fail_log10);
    compare->add_option("--target-pass", xopt.target_pass, "design pass probability");

    CLI11_PARSE(app, argc, argv);
    g_log_level = log_level_from_name(log_level);

    try {
        if (certify->parsed()) {
            return cmd_certify(copt);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sopt);
        }
        if (planner->parsed()) {
            return cmd_plan(popt);
        }
        if (extract->parsed()) {
            return cmd_extract(eopt);
        }
        if (compare->parsed()) {
            return cmd_compare(xopt);
        }
    } catch (const std::exception& error) {
        log_at(kError, error.what());
        return 2;
    }
    return 0;
}
