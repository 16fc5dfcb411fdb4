#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsbc/params.hpp"
#include "tsbc/rng.hpp"

namespace tsbc::bench {

/// One measured configuration. Times are per-iteration averages in
/// milliseconds; counters are exact totals over all iterations, with
/// uniform/gaussian words attributed to their own phase (a Gaussian
/// sampler's internal uniform draws are not double-counted here). bytes is
/// the serialized ciphertext payload volume per iteration.
struct Row {
    std::string suite;
    std::string config;
    uint64_t bits = 0;
    uint64_t iterations = 0;
    double uniform_ms = 0;
    double gaussian_ms = 0;
    double polymul_ms = 0;
    double forward_ms = 0;
    double pointwise_ms = 0;
    double inverse_ms = 0;
    double total_ms = 0;
    uint64_t uniform_words = 0;
    uint64_t gaussian_words = 0;
    uint64_t transforms = 0;
    uint64_t bytes = 0;
    int64_t peak_rss_kib = 0;
};

struct Options {
    uint64_t iterations = 100;  // per-row upper bound
    double row_budget_s = 2.0;  // wall-clock cap per row, >= 3 iterations
    Seed seed{};                // stream seed for the deterministic configs
};

/// Uniform and Gaussian word generation: {hash-stream, os-entropy} x
/// {uniform, polar, ziggurat}, N words per iteration.
std::vector<Row> run_sampler_suite(const ParamSet& ps, const Options& opt);

/// Negacyclic products with per-stage times: key transform reused vs.
/// recomputed per product.
std::vector<Row> run_polymul_suite(const ParamSet& ps, const Options& opt);

/// Whole-message encryption for 256/1024/4096/8192-bit plaintexts:
/// per-bit TLWE baseline, TRLWE with the slow sampler configuration, and
/// TRLWE with the fast configuration.
std::vector<Row> run_encrypt_suite(const ParamSet& ps, const Options& opt);

std::string to_csv(const std::vector<Row>& rows);
std::string to_json(const std::vector<Row>& rows);
std::string to_table(const std::vector<Row>& rows);

/// Ordering checks over finished rows (reuse beats on-the-fly, the hash
/// stream beats per-draw entropy, TRLWE beats the TLWE baseline).
/// Returns violation descriptions, empty when all hold.
std::vector<std::string> check_orderings(const std::vector<Row>& rows);

}  // namespace tsbc::bench
