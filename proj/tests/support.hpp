#pragma once

#include <cmath>
#include <cstdint>

#include "tsbc/params.hpp"
#include "tsbc/rng.hpp"
#include "tsbc/torus.hpp"

namespace tsbc::test {

/// Deterministic input generator for property tests (splitmix64), kept
/// independent of the library stream so RNG tests cannot mask themselves.
class Gen {
public:
    explicit Gen(uint64_t seed) : x_(seed) {}

    uint64_t next_u64() {
        x_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = x_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

    TorusWord word(const ParamSet& ps) { return next_u32() & ps.word_mask(); }

    TorusPoly poly(const ParamSet& ps) {
        TorusPoly out(ps.n);
        for (auto& w : out) w = word(ps);
        return out;
    }

    BinaryPoly bits(uint32_t n) {
        BinaryPoly out(n);
        for (auto& b : out) b = static_cast<uint8_t>(next_u64() & 1);
        return out;
    }

    MessagePoly message(const ParamSet& ps) {
        MessagePoly out(ps.n);
        for (auto& m : out) m = static_cast<uint32_t>(next_u64() & (ps.p - 1));
        return out;
    }

private:
    uint64_t x_;
};

inline Seed fixed_seed(uint8_t tag) {
    Seed s{};
    for (size_t i = 0; i < s.size(); ++i)
        s[i] = static_cast<uint8_t>(tag + 3 * i);
    return s;
}

/// Small instance with sigma_q = 1, handy for exhaustive checks.
inline ParamSet tiny_params(uint32_t log2_q, uint32_t n, uint64_t p = 2) {
    ParamSet ps;
    ps.log2_q = log2_q;
    ps.n = n;
    ps.k = 1;
    ps.sigma = std::ldexp(1.0, -static_cast<int>(log2_q));
    ps.p = p;
    return ps;
}

}  // namespace tsbc::test
