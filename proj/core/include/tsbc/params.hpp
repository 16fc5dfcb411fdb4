#pragma once

#include <cstdint>

namespace tsbc {

/// Parameter bundle for torus (R)LWE instances. All moduli are powers of
/// two; the ciphertext modulus is q = 2^log2_q and the plaintext slots live
/// in Z_p with scaling factor delta = q / p.
struct ParamSet {
    uint32_t log2_q = 32;   // ciphertext modulus bit width, 1..32
    uint32_t n = 1024;      // ring dimension / LWE length, power of two
    uint32_t k = 1;         // number of mask polynomials (fixed to 1)
    double sigma = 0.0;     // std deviation of fresh noise, fraction of the torus
    uint64_t p = 2;         // plaintext modulus, power of two, p <= q

    uint64_t q() const noexcept { return uint64_t{1} << log2_q; }
    uint64_t delta() const noexcept { return q() / p; }
    double sigma_q() const noexcept { return sigma * static_cast<double>(q()); }

    /// Low log2_q bits set; reduces a 32-bit word mod q.
    uint32_t word_mask() const noexcept {
        return static_cast<uint32_t>(q() - 1);
    }

    bool operator==(const ParamSet&) const = default;
};

/// 128-bit-security defaults: q = 2^32, N = 1024, sigma = 2^-25, one bit
/// per coefficient (p = 2, delta = 2^31).
ParamSet lvl1_default();

/// Checks every structural invariant (power-of-two N and p, p | q,
/// sigma*q >= 1, k == 1) and returns the set unchanged.
/// Throws std::invalid_argument naming the violated invariant.
ParamSet validate(const ParamSet& ps);

}  // namespace tsbc
