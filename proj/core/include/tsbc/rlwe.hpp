#pragma once

#include <memory>

#include "tsbc/params.hpp"
#include "tsbc/polymul.hpp"
#include "tsbc/rng.hpp"
#include "tsbc/torus.hpp"

namespace tsbc {

/// Binary ring secret with its transform cached after first use. Immutable
/// once created; copies share the cache, so warming it in one place warms
/// it everywhere.
class RlweSecretKey {
public:
    explicit RlweSecretKey(BinaryPoly s);

    const BinaryPoly& s() const noexcept { return cache_->key(); }
    const FourierKeyCache& cache() const noexcept { return *cache_; }

private:
    std::shared_ptr<FourierKeyCache> cache_;
};

/// (A, B) with B = A*S + delta*M + E; 2N words total.
struct TrlweCiphertext {
    TorusPoly a;
    TorusPoly b;

    bool operator==(const TrlweCiphertext&) const = default;
};

/// N uniform key bits; the transform cache starts cold.
RlweSecretKey rlwe_keygen(ByteSource& src, const ParamSet& ps);

/// Encrypts N plaintext coefficients at once: A uniform, E Gaussian,
/// B = A*S + delta*M + E with the product on the transform path. One
/// forward transform per call once the key cache is warm.
TrlweCiphertext trlwe_encrypt(const MessagePoly& m, const RlweSecretKey& key,
                              ByteSource& src, GaussianSampler& g,
                              const ParamSet& ps);

/// B - A*S mod q, with the product on the exact integer path.
TorusPoly trlwe_phase(const TrlweCiphertext& ct, const RlweSecretKey& key,
                      const ParamSet& ps);

/// Coefficient-wise decode of the phase.
MessagePoly trlwe_decrypt(const TrlweCiphertext& ct, const RlweSecretKey& key,
                          const ParamSet& ps);

/// Polynomial-wise wrapping sum.
TrlweCiphertext trlwe_add(const TrlweCiphertext& x, const TrlweCiphertext& y,
                          const ParamSet& ps);

}  // namespace tsbc
