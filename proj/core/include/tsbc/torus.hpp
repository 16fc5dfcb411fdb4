#pragma once

#include <cstdint>
#include <vector>

#include "tsbc/params.hpp"

namespace tsbc {

/// One element of Z_q stored in the low log2_q bits of a 32-bit word.
/// Addition and negation wrap mod q.
using TorusWord = uint32_t;

/// Coefficient vector of an element of R_q = Z_q[X]/(X^N + 1);
/// coefficient i multiplies X^i. Length is the governing N.
using TorusPoly = std::vector<TorusWord>;

/// Polynomial with coefficients in {0, 1} (secret keys).
using BinaryPoly = std::vector<uint8_t>;

/// Plaintext polynomial with coefficients in Z_p.
using MessagePoly = std::vector<uint32_t>;

inline TorusWord word_add(TorusWord x, TorusWord y, const ParamSet& ps) noexcept {
    return (x + y) & ps.word_mask();
}

inline TorusWord word_sub(TorusWord x, TorusWord y, const ParamSet& ps) noexcept {
    return (x - y) & ps.word_mask();
}

inline TorusWord word_neg(TorusWord x, const ParamSet& ps) noexcept {
    return (0u - x) & ps.word_mask();
}

/// Centered signed representative: w - q * [w >= q/2], in [-q/2, q/2).
inline int64_t centered(TorusWord w, const ParamSet& ps) noexcept {
    const uint64_t q = ps.q();
    const uint64_t v = w;
    return v >= q / 2 ? static_cast<int64_t>(v) - static_cast<int64_t>(q)
                      : static_cast<int64_t>(v);
}

/// Reduces an arbitrary signed value mod q into a torus word.
inline TorusWord to_word(int64_t v, const ParamSet& ps) noexcept {
    return static_cast<TorusWord>(static_cast<uint64_t>(v)) & ps.word_mask();
}

/// Coefficient-wise wrapping sum. Throws on length mismatch.
TorusPoly poly_add(const TorusPoly& x, const TorusPoly& y, const ParamSet& ps);

/// Coefficient-wise additive inverse mod q.
TorusPoly poly_neg(const TorusPoly& x, const ParamSet& ps);

/// Embeds m in Z_p as delta * m mod q. Throws if m >= p.
TorusWord encode(uint32_t m, const ParamSet& ps);

/// Nearest-codeword decode: round(phi * p / q) mod p, exact midpoints
/// rounding toward +. Inverse of encode for |noise| < delta / 2.
uint32_t decode(TorusWord phi, const ParamSet& ps);

/// Splits a bit string into N-coefficient plaintext polynomials,
/// zero-padding the final chunk; bit i of chunk j becomes coefficient i of
/// polynomial j. Requires p == 2.
std::vector<MessagePoly> bits_to_message_poly(const std::vector<uint8_t>& bits,
                                              const ParamSet& ps);

}  // namespace tsbc
