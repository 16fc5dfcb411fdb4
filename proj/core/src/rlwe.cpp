#include "tsbc/rlwe.hpp"

#include <stdexcept>
#include <utility>

namespace tsbc {

RlweSecretKey::RlweSecretKey(BinaryPoly s) {
    for (auto v : s)
        if (v > 1)
            throw std::invalid_argument("rlwe key: coefficients must be bits");
    cache_ = std::make_shared<FourierKeyCache>(std::move(s));
}

RlweSecretKey rlwe_keygen(ByteSource& src, const ParamSet& ps) {
    return RlweSecretKey(uniform_binary_poly(src, ps.n));
}

TrlweCiphertext trlwe_encrypt(const MessagePoly& m, const RlweSecretKey& key,
                              ByteSource& src, GaussianSampler& g,
                              const ParamSet& ps) {
    if (m.size() != ps.n)
        throw std::invalid_argument("trlwe_encrypt: message length mismatch");
    TrlweCiphertext ct;
    ct.a = uniform_poly(src, ps);
    const TorusPoly e = g.sample_poly(src, ps);
    ct.b = negacyclic_mul(ct.a, key.cache(), DwtPlan::shared(ps.n), ps);
    for (uint32_t i = 0; i < ps.n; ++i)
        ct.b[i] = word_add(ct.b[i], word_add(encode(m[i], ps), e[i], ps), ps);
    return ct;
}

TorusPoly trlwe_phase(const TrlweCiphertext& ct, const RlweSecretKey& key,
                      const ParamSet& ps) {
    if (ct.b.size() != ps.n)
        throw std::invalid_argument("trlwe_phase: ciphertext length mismatch");
    const TorusPoly as = negacyclic_mul_naive(ct.a, key.s(), ps);
    TorusPoly phi(ps.n);
    for (uint32_t i = 0; i < ps.n; ++i) phi[i] = word_sub(ct.b[i], as[i], ps);
    return phi;
}

MessagePoly trlwe_decrypt(const TrlweCiphertext& ct, const RlweSecretKey& key,
                          const ParamSet& ps) {
    const TorusPoly phi = trlwe_phase(ct, key, ps);
    MessagePoly m(ps.n);
    for (uint32_t i = 0; i < ps.n; ++i) m[i] = decode(phi[i], ps);
    return m;
}

TrlweCiphertext trlwe_add(const TrlweCiphertext& x, const TrlweCiphertext& y,
                          const ParamSet& ps) {
    return {poly_add(x.a, y.a, ps), poly_add(x.b, y.b, ps)};
}

}  // namespace tsbc
