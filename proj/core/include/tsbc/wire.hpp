#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/rlwe.hpp"
#include "tsbc/torus.hpp"

namespace tsbc::wire {

using Bytes = std::vector<uint8_t>;

/// Payload discriminator in the common header.
enum class Kind : uint8_t {
    params = 1,
    trlwe_batch = 2,
    tlwe_batch = 3,
    secret_key = 4,
};

enum class ErrorCode {
    bad_magic,
    bad_version,
    bad_kind,
    truncated,
    length_mismatch,
    bad_value,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Common 18-byte header: magic "TSBC", version 1, kind, log2_q, reserved
/// (zero), N (2 bytes), p (4 bytes), count (4 bytes); multi-byte fields
/// little-endian. The header fully determines the payload length.
inline constexpr size_t kHeaderBytes = 18;
inline constexpr size_t kParamsPayloadBytes = 12;  // sigma f64 + k u32

struct Header {
    Kind kind;
    uint8_t log2_q;
    uint16_t n;
    uint32_t p;
    uint32_t count;

    /// Parameter view of the header fields. Ciphertext and key headers do
    /// not carry sigma (k is fixed at 1); sigma is left 0 and the result
    /// suits decode/extract arithmetic, not fresh encryption.
    ParamSet params() const;
};

constexpr uint64_t params_bytes() noexcept {
    return kHeaderBytes + kParamsPayloadBytes;
}
constexpr uint64_t trlwe_bytes(uint32_t n, uint32_t count) noexcept {
    return kHeaderBytes + uint64_t{8} * n * count;
}
constexpr uint64_t tlwe_bytes(uint32_t n, uint32_t count) noexcept {
    return kHeaderBytes + uint64_t{4} * (uint64_t{n} + 1) * count;
}
constexpr uint64_t key_bytes(uint32_t n) noexcept {
    return kHeaderBytes + (uint64_t{n} + 7) / 8;
}

/// Parses and validates the common header without touching the payload.
Header peek_header(std::span<const uint8_t> in);

Bytes serialize_params(const ParamSet& ps);
ParamSet deserialize_params(std::span<const uint8_t> in);

Bytes serialize_trlwe_batch(const std::vector<TrlweCiphertext>& cts,
                            const ParamSet& ps);
struct TrlweBatch {
    Header header;
    std::vector<TrlweCiphertext> cts;
};
TrlweBatch deserialize_trlwe_batch(std::span<const uint8_t> in);

Bytes serialize_tlwe_batch(const std::vector<TlweCiphertext>& cts,
                           const ParamSet& ps);
struct TlweBatch {
    Header header;
    std::vector<TlweCiphertext> cts;
};
TlweBatch deserialize_tlwe_batch(std::span<const uint8_t> in);

/// Key bits packed 8 per byte, LSB-first; (N+7)/8 payload bytes, padding
/// bits zero.
Bytes serialize_secret_key(const BinaryPoly& s, const ParamSet& ps);
struct SecretKey {
    Header header;
    BinaryPoly s;
};
SecretKey deserialize_secret_key(std::span<const uint8_t> in);

}  // namespace tsbc::wire
