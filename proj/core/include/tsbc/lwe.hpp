#pragma once

#include "tsbc/params.hpp"
#include "tsbc/rng.hpp"
#include "tsbc/torus.hpp"

namespace tsbc {

/// Binary LWE secret of dimension N.
struct LweSecretKey {
    BinaryPoly s;
};

/// (a, b) with b = <a, s> + delta*m + e; N+1 words total.
struct TlweCiphertext {
    TorusPoly a;
    TorusWord b = 0;

    bool operator==(const TlweCiphertext&) const = default;
};

LweSecretKey lwe_keygen(ByteSource& src, const ParamSet& ps);

/// Encrypts one symbol of Z_p: a uniform, e Gaussian,
/// b = <a, s> + delta*m + e mod q. Consumes N uniform words and one
/// Gaussian per call.
TlweCiphertext tlwe_encrypt(uint32_t m, const LweSecretKey& key,
                            ByteSource& src, GaussianSampler& g,
                            const ParamSet& ps);

/// b - <a, s> mod q = delta*m + e.
TorusWord tlwe_phase(const TlweCiphertext& ct, const LweSecretKey& key,
                     const ParamSet& ps);

uint32_t tlwe_decrypt(const TlweCiphertext& ct, const LweSecretKey& key,
                      const ParamSet& ps);

/// Word-wise wrapping sum.
TlweCiphertext tlwe_add(const TlweCiphertext& x, const TlweCiphertext& y,
                        const ParamSet& ps);

}  // namespace tsbc
