#include "lightrng/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lightrng/errors.hpp"

namespace lightrng {

namespace {

std::string trim(const std::string& text) {
    std::size_t first = 0;
    std::size_t last = text.size();
    while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) {
        ++first;
    }
    while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) {
        --last;
    }
    return text.substr(first, last - first);
}

bool valid_key(const std::string& key) {
    if (key.empty()) {
        return false;
    }
    for (char c : key) {
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

} // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 14695981039346656037ULL;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("config '" + path + "': cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path);
}

ConfigFile ConfigFile::from_string(const std::string& text, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    cfg.digest_ = fnv1a64(text.data(), text.size());

    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) {
            line.erase(hash_pos);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError(name + " line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!valid_key(key)) {
            throw ParseError(name + " line " + std::to_string(line_no) + ": key '" + key +
                             "' must be non-empty lowercase [a-z0-9_]");
        }
        if (value.empty()) {
            throw ParseError(name + " line " + std::to_string(line_no) + ": key '" + key +
                             "' has no value");
        }
        if (cfg.find(key) != nullptr) {
            throw ParseError(name + " line " + std::to_string(line_no) +
                             ": duplicate key '" + key + "'");
        }
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

const std::string* ConfigFile::find(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

bool ConfigFile::has(const std::string& key) const {
    accessed_.insert(key);
    return find(key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& key) const {
    accessed_.insert(key);
    const std::string* value = find(key);
    if (value == nullptr) {
        throw ParseError(name_ + ": missing required key '" + key + "'");
    }
    return *value;
}

double ConfigFile::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
        throw ParseError(name_ + ": key '" + key + "' value '" + text +
                         "' is not a number");
    }
    return value;
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
    const std::string text = get_string(key);
    char* end = nullptr;
    const long long value = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size()) {
        throw ParseError(name_ + ": key '" + key + "' value '" + text +
                         "' is not an integer");
    }
    return value;
}

double ConfigFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigFile::get_int_or(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::string ConfigFile::get_string_or(const std::string& key,
                                      const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

std::string ConfigFile::digest_hex() const {
    char text[17];
    std::snprintf(text, sizeof(text), "%016llx",
                  static_cast<unsigned long long>(digest_));
    return text;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> unused;
    for (const auto& [key, value] : entries_) {
        if (accessed_.find(key) == accessed_.end()) {
            unused.push_back(key);
        }
    }
    return unused;
}

PhotodiodeSpec load_photodiode(const ConfigFile& cfg, const std::string& prefix) {
    PhotodiodeSpec spec;
    spec.bandwidth_hz = cfg.get_double(prefix + "_bandwidth_hz");
    spec.responsivity_a_per_w = cfg.get_double(prefix + "_responsivity_a_per_w");
    spec.gain_ohm = cfg.get_double(prefix + "_gain_ohm");
    spec.wavelength_m = cfg.get_double(prefix + "_wavelength_m");
    spec.noise_sigma_v = cfg.get_double(prefix + "_sigma_volts");
    spec.linear_range.n_lo = cfg.get_int_or(prefix + "_linear_min_photons", 0);
    spec.linear_range.n_hi =
        cfg.get_int_or(prefix + "_linear_max_photons", FockRange::unbounded);
    spec.validate();
    return spec;
}

AdcSpec load_adc(const ConfigFile& cfg, const std::string& prefix) {
    AdcSpec adc;
    adc.bit_depth = static_cast<int>(cfg.get_int(prefix + "_bit_depth"));
    adc.enob = cfg.get_double(prefix + "_enob");
    adc.v_min = cfg.get_double(prefix + "_v_min_volts");
    adc.v_max = cfg.get_double(prefix + "_v_max_volts");
    adc.sample_rate_hz = cfg.get_double(prefix + "_sample_rate_hz");
    adc.validate();
    return adc;
}

ProtocolParams load_protocol_params(const ConfigFile& cfg) {
    ProtocolParams params;
    params.r0 = cfg.get_double_or("r0", 0.5);
    params.r1 = cfg.get_double("r1");
    params.detector_c = load_photodiode(cfg, "cert");
    params.detector_diff = load_photodiode(cfg, "diff");
    params.adc_c = load_adc(cfg, "adc_c");
    params.adc_d = load_adc(cfg, "adc_d");
    params.n_r_plus = cfg.get_int("n_r_plus_photons");
    params.validate();
    return params;
}

CertThresholds load_thresholds(const ConfigFile& cfg, const ProtocolParams& params) {
    const std::int64_t lo = cfg.get_int("threshold_bin_lo");
    const std::int64_t hi = cfg.get_int("threshold_bin_hi");
    return thresholds_from_bins(lo, hi, params.adc_c);
}

SourceModel load_source(const ConfigFile& cfg) {
    const std::string kind = cfg.get_string("source_kind");
    if (kind == "vacuum") {
        return SourceModel::vacuum();
    }
    if (kind == "coherent") {
        return SourceModel::coherent(cfg.get_double("source_mean_photons"));
    }
    if (kind == "thermal") {
        return SourceModel::thermal(cfg.get_double("source_mean_photons"));
    }
    if (kind == "fock") {
        return SourceModel::fock(cfg.get_int("source_fock_n"));
    }
    if (kind == "adversarial_fock") {
        return SourceModel::adversarial_fock(
            load_schedule_file(cfg.get_string("source_schedule_file")));
    }
    throw ParseError(cfg.name() + ": source_kind '" + kind +
                     "' is not one of vacuum, coherent, thermal, fock, adversarial_fock");
}

std::vector<std::int64_t> load_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("schedule '" + path + "': cannot open file");
    }
    std::vector<std::int64_t> schedule;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) {
            line.erase(hash_pos);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        char* end = nullptr;
        const long long value = std::strtoll(stripped.c_str(), &end, 10);
        if (end != stripped.c_str() + stripped.size()) {
            throw ParseError("schedule '" + path + "' line " + std::to_string(line_no) +
                             ": '" + stripped + "' is not an integer");
        }
        schedule.push_back(value);
    }
    return schedule;
}

RunConfig load_run_config(const ConfigFile& cfg) {
    RunConfig run;
    run.m = cfg.get_int("rounds");
    const std::int64_t seed = cfg.get_int("rng_seed");
    if (seed < 0) {
        throw ParseError(cfg.name() + ": rng_seed must be non-negative");
    }
    run.rng_seed = static_cast<std::uint64_t>(seed);
    run.params = load_protocol_params(cfg);
    run.source = load_source(cfg);
    run.thresholds = load_thresholds(cfg, run.params);
    return run;
}

} // namespace lightrng
