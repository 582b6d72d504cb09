#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lightrng/bitvec.hpp"
#include "lightrng/logprob.hpp"

namespace lightrng {

/// Seed of the Toeplitz hash family: h + l - 1 uniformly random bits shared
/// by all blocks (reuse does not degrade the two-universal guarantee).
///
/// Matrix convention (the wire contract): the l x h matrix is
///   T[i][j] = bits[i - j + h - 1],
/// i.e. the first row holds seed bits h-1 ... h+l-2 left to right and the
/// first column holds seed bits h-1 ... 0 top to bottom.
struct ToeplitzSeed {
    BitVec bits;
    std::int64_t h = 0;
    std::int64_t l = 0;

    void validate() const;
};

/// Uniform random seed for the given geometry, drawn from a counter stream.
class CounterRng;
ToeplitzSeed random_seed(std::int64_t h, std::int64_t l, CounterRng& rng);

/// Seed file format: one header line "h l", then the seed bits hex-encoded,
/// most significant nibble first (bit 0 of the seed is the top bit of the
/// first hex digit).
void write_seed_file(const std::string& path, const ToeplitzSeed& seed);
ToeplitzSeed read_seed_file(const std::string& path);

/// Fully resolved extraction plan: block geometry, epsilon ledger, rates.
struct HashPlan {
    std::int64_t h = 0; ///< input bits per block, h = m * b
    std::int64_t l = 0; ///< output bits per block
    std::int64_t m = 0; ///< samples per block
    std::int64_t b = 0; ///< bits per sample
    std::int64_t k = 0; ///< bits per pipeline step, k | h and b | k
    std::int64_t t = 0; ///< blocks concatenated per output string
    double kappa = 0.0; ///< certified min-entropy per block, bits

    LogProb eps_hash = LogProb::impossible();   ///< 2^{(l - kappa - 2)/2}
    LogProb eps_fail_m = LogProb::impossible(); ///< min(1, m * eps_fail)
    LogProb eps_l = LogProb::impossible();      ///< eps_hash + eps_fail_m
    LogProb eps_total = LogProb::impossible();  ///< min(1, t * eps_l)

    double r = 0.0;      ///< compression ratio l / h
    double R_hash = 0.0; ///< hashing operations per second
    double R_data = 0.0; ///< acquired samples per second
    double R_h = 0.0;    ///< hashing-limited bit rate, R_hash * l
    double R_d = 0.0;    ///< data-limited bit rate, R_data * b * l / h
    double R_avg = 0.0;  ///< (1 - eps_c) * min(R_h, R_d)
};

/// Planner inputs.  Exactly one of {l, eps_hash_target} must be set: either
/// the output length is prescribed and the hashing failure follows from it,
/// or a failure target is prescribed and the largest feasible l is chosen.
struct PlanRequest {
    double kappa = 0.0;    ///< certified bits per block
    std::int64_t m = 0;    ///< samples per block
    std::int64_t b = 0;    ///< bits per sample
    std::int64_t t = 1;    ///< blocks per output string
    std::int64_t k = 0;    ///< pipeline step bits; 0 picks k = b
    std::optional<std::int64_t> l;
    std::optional<LogProb> eps_hash_target;
    LogProb eps_fail = LogProb::impossible(); ///< per-sample certification failure
    double R_hash = 0.0;
    double R_data = 0.0;
    double eps_c = 0.0; ///< honest-source abort probability
};

/// Resolve a plan.  Throws ContractError on malformed requests and
/// RegimeError naming the binding constraint when the target is infeasible
/// (an eps_hash below the l >= 1 floor requires larger blocks).
HashPlan plan(const PlanRequest& request);

/// Reference Toeplitz multiply: output[i] = XOR_j T[i][j] & input[j],
/// realised as word-packed row windows of the reversed seed.
BitVec hash_naive(const ToeplitzSeed& seed, const BitVec& input);

/// Streaming kernel: consumes the block in h/k steps of k bits, XOR-adding
/// the seed slice of every set input bit into an l-bit accumulator.
/// Bit-exactly equal to hash_naive on every block.
BitVec hash_pipeline(const ToeplitzSeed& seed, const BitVec& input, std::int64_t k);

struct ExtractReport {
    std::int64_t blocks = 0;          ///< full blocks hashed
    std::int64_t strings = 0;         ///< completed groups of t blocks
    std::int64_t bits_in = 0;         ///< input bits consumed by full blocks
    std::int64_t bits_out = 0;        ///< blocks * l
    std::int64_t discarded_bits = 0;  ///< trailing partial-block bits dropped
    double seconds = 0.0;             ///< wall time spent hashing
    double achieved_bits_per_s = 0.0; ///< bits_out / seconds
    double kappa = 0.0;               ///< certificate provenance, from the plan
    LogProb eps_total = LogProb::impossible();
};

struct ExtractResult {
    std::vector<std::uint8_t> bytes; ///< first extracted bit = MSB of byte 0
    ExtractReport report;
};

/// Hash a raw sample stream (fixed-width b-bit samples, big-endian within
/// each sample) into extracted bytes: m*b bits in, l bits out per block.
ExtractResult extract_stream(const HashPlan& plan, const ToeplitzSeed& seed,
                             const std::vector<std::uint8_t>& sample_stream);

/// Minimal statistical health check of an extracted bit string: monobit
/// frequency test and runs test at significance 0.01.  Requires >= 1e6 bits.
struct SmokeReport {
    std::int64_t bits = 0;
    double p_monobit = 0.0;
    double p_runs = 0.0;
    bool runs_applicable = false; ///< pre-test |pi - 1/2| < 2/sqrt(n)
    bool pass = false;
};

SmokeReport smoke_tests(const BitVec& bits);

} // namespace lightrng
