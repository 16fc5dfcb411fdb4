#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "support.hpp"
#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/rng.hpp"
#include "tsbc/torus.hpp"

using namespace tsbc;
using tsbc::test::fixed_seed;

namespace {

GaussianSampler lvl1_sampler() {
    return GaussianSampler(GaussianSampler::Algorithm::ziggurat,
                           lvl1_default().sigma_q());
}

}  // namespace

TEST_CASE("keygen draws N bits deterministically") {
    const ParamSet ps = lvl1_default();
    RandomStream s1(fixed_seed(40)), s2(fixed_seed(40)), s3(fixed_seed(41));
    const LweSecretKey k1 = lwe_keygen(s1, ps);
    const LweSecretKey k2 = lwe_keygen(s2, ps);
    const LweSecretKey k3 = lwe_keygen(s3, ps);

    REQUIRE(k1.s.size() == ps.n);
    for (uint8_t b : k1.s) CHECK(b <= 1);
    CHECK(k1.s == k2.s);
    CHECK(k1.s != k3.s);
}

TEST_CASE("ciphertext has N mask words plus b") {
    const ParamSet ps = lvl1_default();
    RandomStream s(fixed_seed(42));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);
    const TlweCiphertext ct = tlwe_encrypt(1, key, s, g, ps);
    CHECK(ct.a.size() == 1024);
}

TEST_CASE("degenerate randomness encrypts exactly") {
    const ParamSet ps = lvl1_default();
    ZeroSource zero;
    GaussianSampler g(GaussianSampler::Algorithm::ziggurat, 0.0);
    const LweSecretKey key{BinaryPoly(ps.n, 1)};

    const TlweCiphertext ct = tlwe_encrypt(1, key, zero, g, ps);
    CHECK(ct.a == TorusPoly(ps.n, 0));
    CHECK(ct.b == encode(1, ps));  // b = delta * m exactly
    CHECK(tlwe_phase(ct, key, ps) == encode(1, ps));
    CHECK(tlwe_decrypt(ct, key, ps) == 1);
}

TEST_CASE("per-bit work is N uniform words and one gaussian") {
    const ParamSet ps = lvl1_default();
    const LweSecretKey key{BinaryPoly(ps.n, 1)};

    // sigma 0 isolates the mask draws: exactly N uniform words
    ZeroSource src;
    GaussianSampler g0(GaussianSampler::Algorithm::ziggurat, 0.0);
    tlwe_encrypt(0, key, src, g0, ps);
    CHECK(src.uniforms_consumed() == ps.n);
    CHECK(src.gaussians_emitted() == 1);

    // live sampler still emits exactly one gaussian per bit
    RandomStream live(fixed_seed(43));
    GaussianSampler g = lvl1_sampler();
    for (int i = 0; i < 8; ++i) tlwe_encrypt(1, key, live, g, ps);
    CHECK(live.gaussians_emitted() == 8);
    CHECK(live.uniforms_consumed() >= 8 * ps.n + 8);
}

TEST_CASE("round-trip at lvl1") {
    const ParamSet ps = lvl1_default();
    RandomStream s(fixed_seed(44));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);

    int failures = 0;
    for (int i = 0; i < 2000; ++i) {
        const uint32_t m = static_cast<uint32_t>(i & 1);
        const TlweCiphertext ct = tlwe_encrypt(m, key, s, g, ps);
        if (tlwe_decrypt(ct, key, ps) != m) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("round-trip at p=16") {
    ParamSet ps = lvl1_default();
    ps.p = 16;
    RandomStream s(fixed_seed(45));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);
    for (uint32_t m = 0; m < 16; ++m) {
        const TlweCiphertext ct = tlwe_encrypt(m, key, s, g, ps);
        CHECK(tlwe_decrypt(ct, key, ps) == m);
    }
}

TEST_CASE("phase stays within the noise tail") {
    const ParamSet ps = lvl1_default();
    RandomStream s(fixed_seed(46));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);

    int64_t worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const TlweCiphertext ct = tlwe_encrypt(1, key, s, g, ps);
        const TorusWord noise =
            word_sub(tlwe_phase(ct, key, ps), encode(1, ps), ps);
        worst = std::max<int64_t>(worst, std::llabs(centered(noise, ps)));
    }
    CHECK(worst < int64_t{1} << 13);  // 64 sigma at sigma_q = 128
    CHECK(worst > 0);                 // noise is actually present
}

TEST_CASE("phase and addition are linear") {
    const ParamSet ps = lvl1_default();
    RandomStream s(fixed_seed(47));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);

    const TlweCiphertext c1 = tlwe_encrypt(0, key, s, g, ps);
    const TlweCiphertext c2 = tlwe_encrypt(1, key, s, g, ps);
    const TlweCiphertext sum = tlwe_add(c1, c2, ps);

    CHECK(tlwe_phase(sum, key, ps) ==
          word_add(tlwe_phase(c1, key, ps), tlwe_phase(c2, key, ps), ps));
    CHECK(tlwe_add(c1, c2, ps) == tlwe_add(c2, c1, ps));

    // fresh-noise sums still decode to the message sum mod p
    for (int i = 0; i < 200; ++i) {
        const uint32_t m1 = static_cast<uint32_t>(i & 1);
        const uint32_t m2 = static_cast<uint32_t>((i >> 1) & 1);
        const TlweCiphertext x = tlwe_encrypt(m1, key, s, g, ps);
        const TlweCiphertext y = tlwe_encrypt(m2, key, s, g, ps);
        CHECK(tlwe_decrypt(tlwe_add(x, y, ps), key, ps) == ((m1 + m2) & 1));
    }

    // the all-zero ciphertext is an additive identity
    TlweCiphertext zero;
    zero.a = TorusPoly(ps.n, 0);
    zero.b = 0;
    CHECK(tlwe_add(c1, zero, ps) == c1);

    TlweCiphertext bad;
    bad.a = TorusPoly(4, 0);
    CHECK_THROWS_AS(tlwe_add(c1, bad, ps), std::invalid_argument);
}

TEST_CASE("wrong key garbles decryption") {
    const ParamSet ps = lvl1_default();
    RandomStream s(fixed_seed(48));
    GaussianSampler g = lvl1_sampler();
    const LweSecretKey key = lwe_keygen(s, ps);
    const LweSecretKey wrong = lwe_keygen(s, ps);
    REQUIRE(key.s != wrong.s);

    int errors = 0;
    for (int i = 0; i < 1000; ++i) {
        const uint32_t m = static_cast<uint32_t>(i & 1);
        const TlweCiphertext ct = tlwe_encrypt(m, key, s, g, ps);
        if (tlwe_decrypt(ct, wrong, ps) != m) ++errors;
    }
    CHECK(errors >= 250);  // decode is a coin flip under the wrong key
}
