#include "tsbc/lwe.hpp"

#include <stdexcept>

namespace tsbc {

namespace {

TorusWord mask_key_product(const TorusPoly& a, const BinaryPoly& s,
                           const ParamSet& ps) {
    if (a.size() != s.size() || a.size() != ps.n)
        throw std::invalid_argument("tlwe: key/ciphertext length mismatch");
    TorusWord acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (s[i]) acc = word_add(acc, a[i], ps);
    return acc;
}

}  // namespace

LweSecretKey lwe_keygen(ByteSource& src, const ParamSet& ps) {
    return {uniform_binary_poly(src, ps.n)};
}

TlweCiphertext tlwe_encrypt(uint32_t m, const LweSecretKey& key,
                            ByteSource& src, GaussianSampler& g,
                            const ParamSet& ps) {
    TlweCiphertext ct;
    ct.a = uniform_poly(src, ps);
    const TorusWord e = g.sample_word(src, ps);
    ct.b = word_add(mask_key_product(ct.a, key.s, ps),
                    word_add(encode(m, ps), e, ps), ps);
    return ct;
}

TorusWord tlwe_phase(const TlweCiphertext& ct, const LweSecretKey& key,
                     const ParamSet& ps) {
    return word_sub(ct.b, mask_key_product(ct.a, key.s, ps), ps);
}

uint32_t tlwe_decrypt(const TlweCiphertext& ct, const LweSecretKey& key,
                      const ParamSet& ps) {
    return decode(tlwe_phase(ct, key, ps), ps);
}

TlweCiphertext tlwe_add(const TlweCiphertext& x, const TlweCiphertext& y,
                        const ParamSet& ps) {
    TlweCiphertext out;
    out.a = poly_add(x.a, y.a, ps);
    out.b = word_add(x.b, y.b, ps);
    return out;
}

}  // namespace tsbc
