#include "tsbc/rng.hpp"

#include <sodium.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include <fcntl.h>
#include <unistd.h>

namespace tsbc {

namespace {

void store_le64(uint8_t* out, uint64_t v) {
    for (int i = 0; i < 8; i++)
        out[i] = static_cast<uint8_t>(v >> (8 * i));
}

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Seed seed_from_os() {
    Seed seed;
    OsEntropySource dev;
    dev.fill(seed.data(), seed.size());
    return seed;
}

Seed seed_from_hex(std::string_view hex) {
    if (hex.size() != 64)
        throw std::invalid_argument("seed: expected 64 hex characters");
    Seed seed;
    for (size_t i = 0; i < 32; i++) {
        const int hi = hex_nibble(hex[2 * i]);
        const int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("seed: invalid hex character");
        seed[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return seed;
}

std::string seed_to_hex(const Seed& seed) {
    static const char* digits = "0123456789abcdef";
    std::string out(64, '0');
    for (size_t i = 0; i < 32; i++) {
        out[2 * i] = digits[seed[i] >> 4];
        out[2 * i + 1] = digits[seed[i] & 0xF];
    }
    return out;
}

uint32_t ByteSource::next_u32() {
    uint8_t b[4];
    fill(b, 4);
    ++uniforms_;
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

double ByteSource::next_unit() {
    return std::ldexp(static_cast<double>(next_u32()), -32);
}

double ByteSource::next_unit_nonzero() {
    return std::ldexp(static_cast<double>(next_u32()) + 1.0, -32);
}

RandomStream::RandomStream(const Seed& seed, uint64_t start_block)
    : seed_(seed), next_block_(start_block) {}

void RandomStream::refill() {
    if (exhausted_)
        throw std::overflow_error("RandomStream: block counter exhausted");
    uint8_t input[sizeof(Seed) + 8];
    std::memcpy(input, seed_.data(), seed_.size());
    store_le64(input + seed_.size(), next_block_);
    crypto_generichash(block_.data(), block_.size(), input, sizeof(input),
                       nullptr, 0);
    if (next_block_ == UINT64_MAX)
        exhausted_ = true;
    else
        ++next_block_;
    pos_ = 0;
}

void RandomStream::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        if (pos_ == block_.size())
            refill();
        const size_t take = std::min(n, block_.size() - pos_);
        std::memcpy(out, block_.data() + pos_, take);
        pos_ += take;
        out += take;
        n -= take;
    }
}

OsEntropySource::OsEntropySource() : fd_(::open("/dev/urandom", O_RDONLY)) {
    if (fd_ < 0)
        throw std::system_error(errno, std::generic_category(),
                                "open /dev/urandom");
}

OsEntropySource::~OsEntropySource() {
    if (fd_ >= 0)
        ::close(fd_);
}

void OsEntropySource::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        const ssize_t got = ::read(fd_, out, n);
        if (got <= 0) {
            if (got < 0 && errno == EINTR)
                continue;
            throw std::system_error(errno, std::generic_category(),
                                    "read /dev/urandom");
        }
        out += got;
        n -= static_cast<size_t>(got);
    }
}

void ZeroSource::fill(uint8_t* out, size_t n) {
    std::memset(out, 0, n);
}

TorusWord uniform_word(ByteSource& src, const ParamSet& ps) {
    return src.next_u32() & ps.word_mask();
}

TorusPoly uniform_poly(ByteSource& src, const ParamSet& ps) {
    TorusPoly out(ps.n);
    for (auto& w : out)
        w = uniform_word(src, ps);
    return out;
}

BinaryPoly uniform_binary_poly(ByteSource& src, uint32_t n) {
    std::vector<uint8_t> raw((n + 7) / 8);
    src.fill(raw.data(), raw.size());
    BinaryPoly out(n);
    for (uint32_t i = 0; i < n; i++)
        out[i] = (raw[i >> 3] >> (i & 7)) & 1u;
    return out;
}

namespace {

// Marsaglia-Tsang normal ziggurat, 128 layers.
constexpr double kZigTail = 3.442619855899;      // x coordinate of layer 0
constexpr double kZigArea = 9.91256303526217e-3; // area of each layer
constexpr double kM1 = 2147483648.0;             // 2^31

}  // namespace

GaussianSampler::GaussianSampler(Algorithm alg, double sigma_q)
    : alg_(alg), sigma_q_(sigma_q) {
    if (!(sigma_q >= 0.0))
        throw std::invalid_argument("GaussianSampler: sigma_q must be >= 0");

    double dn = kZigTail;
    double tn = dn;
    const double q = kZigArea / std::exp(-0.5 * dn * dn);

    layer_threshold_[0] = static_cast<uint32_t>((dn / q) * kM1);
    layer_threshold_[1] = 0;
    layer_scale_[0] = q / kM1;
    layer_scale_[127] = dn / kM1;
    layer_density_[0] = 1.0;
    layer_density_[127] = std::exp(-0.5 * dn * dn);

    for (int i = 126; i >= 1; i--) {
        dn = std::sqrt(-2.0 * std::log(kZigArea / dn + std::exp(-0.5 * dn * dn)));
        layer_threshold_[i + 1] = static_cast<uint32_t>((dn / tn) * kM1);
        tn = dn;
        layer_density_[i] = std::exp(-0.5 * dn * dn);
        layer_scale_[i] = dn / kM1;
    }
}

double GaussianSampler::ziggurat_normal(ByteSource& src) {
    bool first_try = true;
    for (;;) {
        ++attempts_;
        const int32_t hz = static_cast<int32_t>(src.next_u32());
        const uint32_t iz = static_cast<uint32_t>(hz) & 127u;
        if (static_cast<uint32_t>(std::llabs(hz)) < layer_threshold_[iz]) {
            if (!first_try)
                ++slow_;
            return hz * layer_scale_[iz];
        }
        first_try = false;
        if (iz == 0) {
            // Tail beyond kZigTail, standard exponential rejection.
            double x, y;
            do {
                x = -std::log(src.next_unit_nonzero()) / kZigTail;
                y = -std::log(src.next_unit_nonzero());
            } while (y + y < x * x);
            ++slow_;
            return hz > 0 ? kZigTail + x : -(kZigTail + x);
        }
        const double x = hz * layer_scale_[iz];
        if (layer_density_[iz] +
                src.next_unit() * (layer_density_[iz - 1] - layer_density_[iz]) <
            std::exp(-0.5 * x * x)) {
            ++slow_;
            return x;
        }
    }
}

double GaussianSampler::polar_normal(ByteSource& src) {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    for (;;) {
        ++attempts_;
        // (k + 0.5) / 2^31 - 1 is symmetric in (-1, 1) and never zero.
        const double u1 =
            std::ldexp(static_cast<double>(src.next_u32()) + 0.5, -31) - 1.0;
        const double u2 =
            std::ldexp(static_cast<double>(src.next_u32()) + 0.5, -31) - 1.0;
        const double s = u1 * u1 + u2 * u2;
        if (s >= 1.0) {
            ++slow_;
            continue;
        }
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = u2 * f;
        have_spare_ = true;
        return u1 * f;
    }
}

double GaussianSampler::sample_real(ByteSource& src) {
    ++emitted_;
    src.count_gaussian();
    if (sigma_q_ == 0.0)
        return 0.0;
    const double z =
        alg_ == Algorithm::ziggurat ? ziggurat_normal(src) : polar_normal(src);
    return z * sigma_q_;
}

TorusWord GaussianSampler::sample_word(ByteSource& src, const ParamSet& ps) {
    const double x = sample_real(src);
    return to_word(static_cast<int64_t>(std::floor(x + 0.5)), ps);
}

TorusPoly GaussianSampler::sample_poly(ByteSource& src, const ParamSet& ps) {
    TorusPoly out(ps.n);
    for (auto& w : out)
        w = sample_word(src, ps);
    return out;
}

SamplerStats sampler_stats(const GaussianSampler& g, const ByteSource& src) {
    if (g.emitted() < 100000)
        throw std::invalid_argument(
            "sampler_stats: need at least 10^5 emitted Gaussians");
    SamplerStats stats;
    stats.uniforms_per_gaussian =
        static_cast<double>(src.uniforms_consumed()) /
        static_cast<double>(src.gaussians_emitted());
    stats.fallback_rate =
        g.algorithm() == GaussianSampler::Algorithm::ziggurat
            ? static_cast<double>(g.slow_events()) /
                  static_cast<double>(g.emitted())
            : static_cast<double>(g.slow_events()) /
                  static_cast<double>(g.attempts());
    return stats;
}

}  // namespace tsbc
