#include "tsbc/torus.hpp"

#include <stdexcept>

namespace tsbc {

TorusPoly poly_add(const TorusPoly& x, const TorusPoly& y, const ParamSet& ps) {
    if (x.size() != y.size())
        throw std::invalid_argument("poly_add: length mismatch");
    TorusPoly out(x.size());
    for (size_t i = 0; i < x.size(); i++)
        out[i] = word_add(x[i], y[i], ps);
    return out;
}

TorusPoly poly_neg(const TorusPoly& x, const ParamSet& ps) {
    TorusPoly out(x.size());
    for (size_t i = 0; i < x.size(); i++)
        out[i] = word_neg(x[i], ps);
    return out;
}

TorusWord encode(uint32_t m, const ParamSet& ps) {
    if (m >= ps.p)
        throw std::invalid_argument("encode: message out of Z_p range");
    return static_cast<TorusWord>(ps.delta() * m) & ps.word_mask();
}

uint32_t decode(TorusWord phi, const ParamSet& ps) {
    // floor(phi * p / q + 1/2) in 64-bit integer arithmetic; q and p are
    // powers of two so phi * p + q/2 cannot overflow.
    const uint64_t scaled = static_cast<uint64_t>(phi) * ps.p + (ps.q() >> 1);
    return static_cast<uint32_t>((scaled >> ps.log2_q) & (ps.p - 1));
}

std::vector<MessagePoly> bits_to_message_poly(const std::vector<uint8_t>& bits,
                                              const ParamSet& ps) {
    if (ps.p != 2)
        throw std::invalid_argument("bits_to_message_poly: requires p == 2");
    const size_t n = ps.n;
    const size_t chunks = bits.empty() ? 0 : (bits.size() + n - 1) / n;
    std::vector<MessagePoly> out(chunks, MessagePoly(n, 0));
    for (size_t i = 0; i < bits.size(); i++)
        out[i / n][i % n] = bits[i] & 1u;
    return out;
}

}  // namespace tsbc
