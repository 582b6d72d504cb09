#include "lightrng/extractor.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>

#include "lightrng/errors.hpp"
#include "lightrng/rng.hpp"

namespace lightrng {

void ToeplitzSeed::validate() const {
    if (h < 1 || l < 1) {
        throw ContractError("ToeplitzSeed: h and l must be >= 1");
    }
    if (std::ssize(bits) != h + l - 1) {
        throw ContractError("ToeplitzSeed: seed must hold exactly h + l - 1 bits");
    }
}

ToeplitzSeed random_seed(std::int64_t h, std::int64_t l, CounterRng& rng) {
    if (h < 1 || l < 1) {
        throw ContractError("random_seed: h and l must be >= 1");
    }
    BitVec bits;
    std::int64_t remaining = h + l - 1;
    while (remaining > 0) {
        const int chunk = int(std::min<std::int64_t>(64, remaining));
        bits.append_bits(rng.next_u64(), chunk);
        remaining -= chunk;
    }
    return ToeplitzSeed{std::move(bits), h, l};
}

void write_seed_file(const std::string& path, const ToeplitzSeed& seed) {
    seed.validate();
    std::ofstream out(path);
    if (!out) {
        throw ParseError("write_seed_file: cannot open " + path);
    }
    out << seed.h << ' ' << seed.l << '\n';
    const std::vector<std::uint8_t> bytes = seed.bits.to_bytes();
    const std::size_t nibbles = (seed.bits.size() + 3) / 4;
    static const char digits[] = "0123456789abcdef";
    for (std::size_t i = 0; i < nibbles; ++i) {
        const std::uint8_t byte = bytes[i / 2];
        out << digits[i % 2 == 0 ? byte >> 4 : byte & 0x0F];
    }
    out << '\n';
    if (!out.flush()) {
        throw ParseError("write_seed_file: write failed for " + path);
    }
}

ToeplitzSeed read_seed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("read_seed_file: cannot open " + path);
    }
    std::int64_t h = 0;
    std::int64_t l = 0;
    if (!(in >> h >> l) || h < 1 || l < 1) {
        throw ParseError("read_seed_file: malformed header line (expected \"h l\")");
    }
    std::string hex;
    std::string token;
    while (in >> token) {
        hex += token;
    }
    const std::size_t nbits = std::size_t(h + l - 1);
    if (hex.size() != (nbits + 3) / 4) {
        throw ParseError("read_seed_file: hex payload length does not match h + l - 1 bits");
    }
    BitVec bits(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
        const char c = hex[i / 4];
        int value = 0;
        if (c >= '0' && c <= '9') {
            value = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            value = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            value = c - 'A' + 10;
        } else {
            throw ParseError("read_seed_file: non-hex character in payload");
        }
        if ((value >> (3 - int(i % 4))) & 1) {
            bits.set(i, true);
        }
    }
    return ToeplitzSeed{std::move(bits), h, l};
}

HashPlan plan(const PlanRequest& request) {
    if (!(request.kappa >= 0.0) || !std::isfinite(request.kappa)) {
        throw ContractError("plan: kappa must be finite and >= 0");
    }
    if (request.m < 1 || request.b < 1 || request.t < 1) {
        throw ContractError("plan: m, b and t must be >= 1");
    }
    if (request.b > 64) {
        throw ContractError("plan: more than 64 bits per sample is unsupported");
    }
    const std::int64_t h = request.m * request.b;
    if (request.kappa > double(h)) {
        throw ContractError("plan: kappa exceeds the block's bit capacity");
    }
    const std::int64_t k = request.k == 0 ? request.b : request.k;
    if (k < 1 || h % k != 0 || k % request.b != 0) {
        throw ContractError("plan: k must divide h and be a multiple of b");
    }
    if (request.l.has_value() == request.eps_hash_target.has_value()) {
        throw ContractError("plan: exactly one of l and eps_hash target must be given");
    }
    if (!(request.R_hash >= 0.0) || !(request.R_data >= 0.0) ||
        !std::isfinite(request.R_hash) || !std::isfinite(request.R_data)) {
        throw ContractError("plan: rates must be finite and >= 0");
    }
    if (!(request.eps_c >= 0.0 && request.eps_c <= 1.0)) {
        throw ContractError("plan: eps_c must lie in [0, 1]");
    }

    std::int64_t l = 0;
    if (request.l.has_value()) {
        l = *request.l;
        if (l < 1) {
            throw ContractError("plan: l must be >= 1");
        }
    } else {
        const LogProb target = *request.eps_hash_target;
        if (target.is_impossible()) {
            throw ContractError("plan: eps_hash target must be a positive probability");
        }
        // Largest l with 2^{(l - kappa - 2)/2} <= target, i.e.
        // l = floor(kappa + 2 + 2 log2 target); below 1 no block this size
        // can reach the target and a larger kappa is mandatory.
        const double raw = request.kappa + 2.0 + 2.0 * target.log2();
        if (!(raw >= 1.0)) {
            throw RegimeError(
                "plan: eps_hash target is below the l >= 1 floor 2^{-(kappa+1)/2}; "
                "a larger hashing block (more certified bits per block) is mandatory");
        }
        l = std::int64_t(std::floor(raw));
        while (l > 1 &&
               LogProb::from_log2((double(l) - request.kappa - 2.0) / 2.0) > target) {
            --l; // floating-point floor guard; at most one step in practice
        }
    }
    if (l > h) {
        throw ContractError("plan: l exceeds h (compression ratio above 1)");
    }

    HashPlan p;
    p.h = h;
    p.l = l;
    p.m = request.m;
    p.b = request.b;
    p.k = k;
    p.t = request.t;
    p.kappa = request.kappa;
    p.eps_hash = LogProb::from_log2((double(l) - request.kappa - 2.0) / 2.0);
    p.eps_fail_m = request.eps_fail.scaled(double(request.m));
    p.eps_l = p.eps_hash + p.eps_fail_m;
    p.eps_total = p.eps_l.scaled(double(request.t));
    p.r = double(l) / double(h);
    p.R_hash = request.R_hash;
    p.R_data = request.R_data;
    p.R_h = request.R_hash * double(l);
    p.R_d = request.R_data * double(request.b) * double(l) / double(h);
    p.R_avg = (1.0 - request.eps_c) * std::min(p.R_h, p.R_d);
    return p;
}

BitVec hash_naive(const ToeplitzSeed& seed, const BitVec& input) {
    seed.validate();
    if (std::ssize(input) != seed.h) {
        throw ContractError("hash_naive: input must hold exactly h bits");
    }
    // Row i of T is a length-h window of the reversed seed at offset l-1-i:
    // T[i][j] = bits[i - j + h - 1] = reversed[(l - 1 - i) + j].
    const BitVec rev = seed.bits.reversed();
    const std::vector<std::uint64_t>& in_words = input.words();
    BitVec out(std::size_t(seed.l));
    for (std::int64_t i = 0; i < seed.l; ++i) {
        const std::size_t offset = std::size_t(seed.l - 1 - i);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < in_words.size(); ++w) {
            acc ^= rev.window64(offset + 64 * w) & in_words[w];
        }
        if (std::popcount(acc) & 1U) {
            out.set(std::size_t(i), true);
        }
    }
    return out;
}

BitVec hash_pipeline(const ToeplitzSeed& seed, const BitVec& input, std::int64_t k) {
    seed.validate();
    if (std::ssize(input) != seed.h) {
        throw ContractError("hash_pipeline: input must hold exactly h bits");
    }
    if (k < 1 || seed.h % k != 0) {
        throw ContractError("hash_pipeline: k must divide h");
    }
    // Column j of T is a length-l window of the seed at offset h-1-j:
    // T[i][j] = bits[(h - 1 - j) + i].  Each step folds k input bits by
    // XOR-adding the matching seed windows into the accumulator.
    const std::size_t acc_words = (std::size_t(seed.l) + 63) / 64;
    std::vector<std::uint64_t> acc(acc_words, 0);
    const std::int64_t steps = seed.h / k;
    for (std::int64_t step = 0; step < steps; ++step) {
        for (std::int64_t j = step * k; j < (step + 1) * k; ++j) {
            if (!input.get(std::size_t(j))) {
                continue;
            }
            const std::size_t offset = std::size_t(seed.h - 1 - j);
            for (std::size_t w = 0; w < acc_words; ++w) {
                acc[w] ^= seed.bits.window64(offset + 64 * w);
            }
        }
    }
    BitVec out(std::size_t(seed.l));
    for (std::int64_t i = 0; i < seed.l; ++i) {
        if ((acc[std::size_t(i) / 64] >> (std::size_t(i) % 64)) & 1ULL) {
            out.set(std::size_t(i), true);
        }
    }
    return out;
}

ExtractResult extract_stream(const HashPlan& plan, const ToeplitzSeed& seed,
                             const std::vector<std::uint8_t>& sample_stream) {
    if (plan.h < 1 || plan.l < 1 || plan.t < 1 || plan.k < 1) {
        throw ContractError("extract_stream: plan is not resolved");
    }
    if (seed.h != plan.h || seed.l != plan.l) {
        throw ContractError("extract_stream: seed geometry differs from the plan");
    }
    seed.validate();

    const std::int64_t total_bits = 8 * std::ssize(sample_stream);
    const std::int64_t blocks = total_bits / plan.h;

    ExtractResult result;
    result.report.kappa = plan.kappa;
    result.report.eps_total = plan.eps_total;
    result.report.discarded_bits = total_bits - blocks * plan.h;
    if (blocks == 0) {
        return result;
    }

    const BitVec all = BitVec::from_bytes(sample_stream, std::size_t(total_bits));
    BitVec out;
    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t bl = 0; bl < blocks; ++bl) {
        const BitVec block = all.slice(std::size_t(bl * plan.h), std::size_t(plan.h));
        const BitVec hashed = hash_pipeline(seed, block, plan.k);
        for (std::int64_t i = 0; i < plan.l; ++i) {
            out.append(hashed.get(std::size_t(i)));
        }
    }
    const auto stop = std::chrono::steady_clock::now();

    result.bytes = out.to_bytes();
    result.report.blocks = blocks;
    result.report.strings = blocks / plan.t;
    result.report.bits_in = blocks * plan.h;
    result.report.bits_out = blocks * plan.l;
    result.report.seconds = std::chrono::duration<double>(stop - start).count();
    result.report.achieved_bits_per_s =
        double(result.report.bits_out) / std::max(result.report.seconds, 1e-9);
    return result;
}

SmokeReport smoke_tests(const BitVec& bits) {
    const std::int64_t n = std::ssize(bits);
    if (n < 1000000) {
        throw ContractError("smoke_tests: needs at least 1e6 bits");
    }
    SmokeReport report;
    report.bits = n;

    const std::int64_t ones = std::int64_t(bits.popcount());
    const double s_obs = std::fabs(double(2 * ones - n)) / std::sqrt(double(n));
    report.p_monobit = std::erfc(s_obs / std::sqrt(2.0));

    const double pi = double(ones) / double(n);
    report.runs_applicable = std::fabs(pi - 0.5) < 2.0 / std::sqrt(double(n));
    if (report.runs_applicable) {
        std::int64_t v = 1;
        for (std::int64_t i = 1; i < n; ++i) {
            v += bits.get(std::size_t(i)) != bits.get(std::size_t(i - 1)) ? 1 : 0;
        }
        const double expected = 2.0 * double(n) * pi * (1.0 - pi);
        report.p_runs = std::erfc(std::fabs(double(v) - expected) /
                                  (2.0 * std::sqrt(2.0 * double(n)) * pi * (1.0 - pi)));
    }
    report.pass =
        report.p_monobit >= 0.01 && report.runs_applicable && report.p_runs >= 0.01;
    return report;
}

} // namespace lightrng
