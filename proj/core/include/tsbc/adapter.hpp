#pragma once

#include <vector>

#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/rlwe.hpp"

namespace tsbc {

/// N extracted ciphertexts; entry h decrypts to message coefficient h.
using ExtractionResult = std::vector<TlweCiphertext>;

/// TLWE key whose bits are the ring key's coefficient vector.
LweSecretKey extract_key(const RlweSecretKey& key);

/// Coefficient-h TLWE ciphertext of a TRLWE ciphertext. Index shuffling
/// plus negation mod q only: no RNG, no noise growth, key-independent.
TlweCiphertext sample_extract(const TrlweCiphertext& ct, uint32_t h,
                              const ParamSet& ps);

/// Extractions for h in [first, first + count), in order. The sub-range
/// form lets a server drop padding coefficients of a final partial block.
ExtractionResult trlwe_to_tlwes(const TrlweCiphertext& ct, uint32_t first,
                                uint32_t count, const ParamSet& ps);

/// All N extractions.
ExtractionResult trlwe_to_tlwes(const TrlweCiphertext& ct, const ParamSet& ps);

}  // namespace tsbc
