#include "tsbc/adapter.hpp"

#include <stdexcept>

namespace tsbc {

LweSecretKey extract_key(const RlweSecretKey& key) { return {key.s()}; }

TlweCiphertext sample_extract(const TrlweCiphertext& ct, uint32_t h,
                              const ParamSet& ps) {
    const uint32_t n = ps.n;
    if (ct.a.size() != n || ct.b.size() != n)
        throw std::invalid_argument("sample_extract: ciphertext length mismatch");
    if (h >= n) throw std::out_of_range("sample_extract: index out of range");
    TlweCiphertext out;
    out.a.resize(n);
    for (uint32_t i = 0; i <= h; ++i) out.a[i] = ct.a[h - i];
    for (uint32_t i = h + 1; i < n; ++i)
        out.a[i] = word_neg(ct.a[n + h - i], ps);
    out.b = ct.b[h];
    return out;
}

ExtractionResult trlwe_to_tlwes(const TrlweCiphertext& ct, uint32_t first,
                                uint32_t count, const ParamSet& ps) {
    if (first > ps.n || count > ps.n - first)
        throw std::out_of_range("trlwe_to_tlwes: range out of bounds");
    ExtractionResult out;
    out.reserve(count);
    for (uint32_t h = first; h < first + count; ++h)
        out.push_back(sample_extract(ct, h, ps));
    return out;
}

ExtractionResult trlwe_to_tlwes(const TrlweCiphertext& ct, const ParamSet& ps) {
    return trlwe_to_tlwes(ct, 0, ps.n, ps);
}

}  // namespace tsbc
