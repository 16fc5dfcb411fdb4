#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "support.hpp"
#include "tsbc/params.hpp"
#include "tsbc/torus.hpp"

using namespace tsbc;
using tsbc::test::Gen;
using tsbc::test::tiny_params;

TEST_CASE("word arithmetic wraps mod q") {
    const ParamSet full = lvl1_default();
    CHECK(word_add(0xffffffffu, 1u, full) == 0u);
    CHECK(word_sub(0u, 1u, full) == 0xffffffffu);
    CHECK(word_neg(1u, full) == 0xffffffffu);
    CHECK(word_neg(0u, full) == 0u);

    const ParamSet small = tiny_params(8, 4);
    CHECK(word_add(200u, 100u, small) == 44u);
    CHECK(word_sub(10u, 20u, small) == 246u);
    CHECK(word_neg(1u, small) == 255u);
}

TEST_CASE("centered representative") {
    const ParamSet ps = lvl1_default();
    CHECK(centered(0u, ps) == 0);
    CHECK(centered(1u, ps) == 1);
    CHECK(centered(0x7fffffffu, ps) == 0x7fffffffll);
    CHECK(centered(0x80000000u, ps) == -0x80000000ll);
    CHECK(centered(0xffffffffu, ps) == -1);

    const ParamSet small = tiny_params(8, 4);
    CHECK(centered(127u, small) == 127);
    CHECK(centered(128u, small) == -128);
    CHECK(centered(255u, small) == -1);

    // to_word inverts centered for every representable value
    Gen g(11);
    for (int i = 0; i < 1000; ++i) {
        const TorusWord w = g.word(ps);
        CHECK(to_word(centered(w, ps), ps) == w);
    }
    CHECK(to_word(-1, ps) == 0xffffffffu);
    CHECK(to_word(-1, small) == 255u);
}

TEST_CASE("poly_add and poly_neg") {
    const ParamSet ps = lvl1_default();
    CHECK(poly_add({1, 2}, {3, 4}, ps) == TorusPoly{4, 6});
    CHECK(poly_add({0xffffffffu}, {1}, ps) == TorusPoly{0});
    CHECK(poly_neg({0}, ps) == TorusPoly{0});
    CHECK(poly_neg({1}, ps) == TorusPoly{0xffffffffu});

    CHECK_THROWS_AS(poly_add({1, 2}, {3}, ps), std::invalid_argument);

    Gen g(12);
    ParamSet p16 = tiny_params(32, 16);
    for (int t = 0; t < 50; ++t) {
        const TorusPoly x = g.poly(p16), y = g.poly(p16), z = g.poly(p16);
        CHECK(poly_add(x, poly_neg(x, p16), p16) == TorusPoly(16, 0));
        CHECK(poly_neg(poly_neg(x, p16), p16) == x);
        CHECK(poly_add(x, y, p16) == poly_add(y, x, p16));
        CHECK(poly_add(poly_add(x, y, p16), z, p16) ==
              poly_add(x, poly_add(y, z, p16), p16));
    }
}

TEST_CASE("encode") {
    const ParamSet ps = lvl1_default();
    CHECK(encode(0, ps) == 0u);
    CHECK(encode(1, ps) == 0x80000000u);
    CHECK_THROWS_AS(encode(2, ps), std::invalid_argument);

    ParamSet p4 = ps;
    p4.p = 4;
    CHECK(encode(3, p4) == 3u << 30);
}

TEST_CASE("decode rounds to the nearest codeword, midpoints up") {
    const ParamSet ps = lvl1_default();
    CHECK(decode(0x80000000u, ps) == 1);
    CHECK(decode(0x80000000u + 100u, ps) == 1);
    CHECK(decode(0u, ps) == 0);
    CHECK(decode(0xfffffffbu, ps) == 0);  // q - 5 wraps to codeword 0
    CHECK(decode(0x40000000u, ps) == 1);  // exact midpoint rounds toward +
    CHECK(decode(0x40000000u - 1u, ps) == 0);
    CHECK(decode(0xc0000000u, ps) == 0);  // midpoint above codeword 1 wraps
    CHECK(decode(0xc0000000u - 1u, ps) == 1);
}

TEST_CASE("decode matches a brute-force nearest-codeword search at q=256") {
    for (uint64_t p : {uint64_t{2}, uint64_t{4}, uint64_t{16}}) {
        const ParamSet ps = tiny_params(8, 4, p);
        const int64_t q = 256;
        for (uint32_t phi = 0; phi < 256; ++phi) {
            // scan every codeword; on a distance tie take the one above phi
            uint32_t best = 0;
            int64_t best_abs = q;
            bool best_above = false;
            for (uint32_t m = 0; m < p; ++m) {
                const int64_t cw = static_cast<int64_t>(m * ps.delta());
                int64_t diff = ((phi - cw) % q + q + q / 2) % q - q / 2;
                const int64_t a = diff < 0 ? -diff : diff;
                const bool above = diff < 0;
                if (a < best_abs || (a == best_abs && above && !best_above)) {
                    best = m;
                    best_abs = a;
                    best_above = above;
                }
            }
            CAPTURE(p);
            CAPTURE(phi);
            CHECK(decode(phi, ps) == best);
        }
    }
}

TEST_CASE("decode inverts encode under bounded noise") {
    // exhaustive at q=256, p=2: any |e| < delta/2 = 64 is removable
    const ParamSet small = tiny_params(8, 4);
    for (uint32_t m = 0; m < 2; ++m) {
        for (int e = -63; e <= 63; ++e) {
            const TorusWord phi = to_word(
                static_cast<int64_t>(encode(m, small)) + e, small);
            CHECK(decode(phi, small) == m);
        }
    }

    // random spot checks at lvl1 over several p
    Gen g(13);
    for (uint64_t p : {uint64_t{2}, uint64_t{16}, uint64_t{256}}) {
        ParamSet ps = lvl1_default();
        ps.p = p;
        const int64_t half = static_cast<int64_t>(ps.delta()) / 2;
        for (int t = 0; t < 2000; ++t) {
            const uint32_t m = static_cast<uint32_t>(g.next_u64() & (p - 1));
            const int64_t e =
                static_cast<int64_t>(g.next_u64() % (2 * half - 1)) - (half - 1);
            const TorusWord phi =
                to_word(static_cast<int64_t>(encode(m, ps)) + e, ps);
            CHECK(decode(phi, ps) == m);
        }
    }
}

TEST_CASE("decode shifts by one codeword per added delta") {
    Gen g(14);
    const ParamSet ps = lvl1_default();
    for (int t = 0; t < 1000; ++t) {
        const TorusWord phi = g.word(ps);
        const TorusWord shifted = word_add(phi, static_cast<TorusWord>(ps.delta()), ps);
        CHECK(decode(shifted, ps) == ((decode(phi, ps) + 1) & (ps.p - 1)));
    }
}

TEST_CASE("bits_to_message_poly") {
    ParamSet ps = lvl1_default();

    SUBCASE("1024 bits make one polynomial") {
        std::vector<uint8_t> bits(1024, 1);
        const auto polys = bits_to_message_poly(bits, ps);
        REQUIRE(polys.size() == 1);
        CHECK(polys[0].size() == 1024);
    }

    SUBCASE("4096 bits make four polynomials") {
        std::vector<uint8_t> bits(4096, 0);
        bits[1024] = 1;  // first bit of the second chunk
        const auto polys = bits_to_message_poly(bits, ps);
        REQUIRE(polys.size() == 4);
        CHECK(polys[1][0] == 1);
        CHECK(polys[0] == MessagePoly(1024, 0));
    }

    SUBCASE("single set bit lands on coefficient 0") {
        const auto polys = bits_to_message_poly({1}, ps);
        REQUIRE(polys.size() == 1);
        CHECK(polys[0][0] == 1);
        for (size_t i = 1; i < polys[0].size(); ++i) CHECK(polys[0][i] == 0);
    }

    SUBCASE("final chunk is zero padded") {
        const ParamSet small = tiny_params(8, 4);
        const auto polys = bits_to_message_poly({1, 0, 1, 1, 1}, small);
        REQUIRE(polys.size() == 2);
        CHECK(polys[0] == MessagePoly{1, 0, 1, 1});
        CHECK(polys[1] == MessagePoly{1, 0, 0, 0});
    }

    SUBCASE("requires one bit per coefficient") {
        ParamSet p4 = ps;
        p4.p = 4;
        CHECK_THROWS_AS(bits_to_message_poly({1}, p4), std::invalid_argument);
    }
}
