#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tsbc/params.hpp"
#include "tsbc/torus.hpp"

namespace tsbc {

/// 32 bytes of entropy seeding a deterministic stream.
using Seed = std::array<uint8_t, 32>;

Seed seed_from_os();
Seed seed_from_hex(std::string_view hex);  // exactly 64 hex chars
std::string seed_to_hex(const Seed& seed);

/// Source of random bytes with consumption counters shared by every
/// sampler. uniforms_consumed counts primitive uniform draws (one per
/// 32-bit word or unit double), gaussians_emitted counts Gaussian samples.
class ByteSource {
public:
    virtual ~ByteSource() = default;

    /// Next n raw bytes from the source.
    virtual void fill(uint8_t* out, size_t n) = 0;

    /// Next 32-bit word, little-endian. Counts one uniform draw.
    uint32_t next_u32();

    /// Uniform double in [0,1) with 2^-32 granularity. One uniform draw.
    double next_unit();

    /// Uniform double in (0,1], safe as a log() argument. One uniform draw.
    double next_unit_nonzero();

    uint64_t uniforms_consumed() const noexcept { return uniforms_; }
    uint64_t gaussians_emitted() const noexcept { return gaussians_; }
    void count_gaussian() noexcept { ++gaussians_; }

private:
    uint64_t uniforms_ = 0;
    uint64_t gaussians_ = 0;
};

/// Deterministic stream expanding a 32-byte seed with BLAKE2b-512:
/// block_i = H(seed || le64(i)), concatenated in counter order. Exhausting
/// all 2^64 blocks is detected and reported, never wrapped.
class RandomStream final : public ByteSource {
public:
    explicit RandomStream(const Seed& seed, uint64_t start_block = 0);

    void fill(uint8_t* out, size_t n) override;

private:
    void refill();

    Seed seed_;
    uint64_t next_block_;
    bool exhausted_ = false;
    std::array<uint8_t, 64> block_{};
    size_t pos_ = sizeof(block_);
};

/// Reads the platform entropy device with one read() per fill call,
/// i.e. per draw; the deliberately slow per-draw baseline.
class OsEntropySource final : public ByteSource {
public:
    OsEntropySource();
    ~OsEntropySource() override;
    OsEntropySource(const OsEntropySource&) = delete;
    OsEntropySource& operator=(const OsEntropySource&) = delete;

    void fill(uint8_t* out, size_t n) override;

private:
    int fd_;
};

/// Yields zero bytes forever; degenerate source for exactness tests.
class ZeroSource final : public ByteSource {
public:
    void fill(uint8_t* out, size_t n) override;
};

/// Uniform word over Z_q: four stream bytes little-endian, masked to the
/// low log2_q bits (q is a power of two, so there is no modulo bias).
TorusWord uniform_word(ByteSource& src, const ParamSet& ps);

/// N independent uniform words in coefficient order.
TorusPoly uniform_poly(ByteSource& src, const ParamSet& ps);

/// n uniform bits, packed off (n+7)/8 stream bytes LSB-first.
BinaryPoly uniform_binary_poly(ByteSource& src, uint32_t n);

/// Discrete Gaussian sampler over the integers with standard deviation
/// sigma_q, by either the polar method (reference) or the Ziggurat method
/// (default fast path). Single-owner mutable state; pair one sampler with
/// one stream.
class GaussianSampler {
public:
    enum class Algorithm { polar, ziggurat };

    GaussianSampler(Algorithm alg, double sigma_q);

    /// Real sample from N(0, sigma_q^2). sigma_q == 0 short-circuits to 0.
    double sample_real(ByteSource& src);

    /// round(x) mod q, ties toward +, centered convention.
    TorusWord sample_word(ByteSource& src, const ParamSet& ps);

    /// N independent Gaussian words in coefficient order.
    TorusPoly sample_poly(ByteSource& src, const ParamSet& ps);

    Algorithm algorithm() const noexcept { return alg_; }
    double sigma_q() const noexcept { return sigma_q_; }

    uint64_t emitted() const noexcept { return emitted_; }
    /// Ziggurat: samples that left the single-lookup fast path.
    /// Polar: candidate pairs rejected (outside the unit disc).
    uint64_t slow_events() const noexcept { return slow_; }
    /// Polar: candidate pairs drawn. Ziggurat: layer lookups.
    uint64_t attempts() const noexcept { return attempts_; }

private:
    double polar_normal(ByteSource& src);
    double ziggurat_normal(ByteSource& src);

    Algorithm alg_;
    double sigma_q_;

    // Ziggurat layer tables (normal distribution, 128 layers).
    std::array<uint32_t, 128> layer_threshold_{};
    std::array<double, 128> layer_scale_{};
    std::array<double, 128> layer_density_{};

    // Polar method emits samples in pairs; the spare is cached.
    bool have_spare_ = false;
    double spare_ = 0.0;

    uint64_t emitted_ = 0;
    uint64_t slow_ = 0;
    uint64_t attempts_ = 0;
};

struct SamplerStats {
    double uniforms_per_gaussian;
    /// Ziggurat: slow-path fraction of emitted samples (fast-path rate is
    /// 1 - fallback_rate). Polar: rejected fraction of candidate pairs.
    double fallback_rate;
};

/// Measured ratios from the counters of a dedicated sampler/stream pair.
/// Throws unless at least 10^5 Gaussians have been emitted.
SamplerStats sampler_stats(const GaussianSampler& g, const ByteSource& src);

}  // namespace tsbc
