#include "tsbc/wire.hpp"

#include <bit>
#include <cstring>

namespace tsbc::wire {

namespace {

constexpr uint8_t kMagic[4] = {'T', 'S', 'B', 'C'};
constexpr uint8_t kVersion = 1;

void put_u16(Bytes& b, uint16_t v) {
    b.push_back(static_cast<uint8_t>(v));
    b.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(Bytes& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& b, uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) |
           (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

void put_header(Bytes& out, Kind kind, const ParamSet& ps, uint32_t count) {
    if (ps.log2_q < 1 || ps.log2_q > 32)
        throw Error(ErrorCode::bad_value, "header: log2_q out of range");
    if (ps.n == 0 || ps.n > 0xffff || !std::has_single_bit(ps.n))
        throw Error(ErrorCode::bad_value, "header: N not a 16-bit power of two");
    if (ps.p < 2 || ps.p > 0xffffffffull || !std::has_single_bit(ps.p) ||
        ps.p > ps.q())
        throw Error(ErrorCode::bad_value, "header: p unrepresentable");
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<uint8_t>(kind));
    out.push_back(static_cast<uint8_t>(ps.log2_q));
    out.push_back(0);  // reserved
    put_u16(out, static_cast<uint16_t>(ps.n));
    put_u32(out, static_cast<uint32_t>(ps.p));
    put_u32(out, count);
}

/// Total byte size implied by a validated header.
uint64_t expected_bytes(const Header& h) {
    switch (h.kind) {
        case Kind::params: return params_bytes();
        case Kind::trlwe_batch: return trlwe_bytes(h.n, h.count);
        case Kind::tlwe_batch: return tlwe_bytes(h.n, h.count);
        case Kind::secret_key: return key_bytes(h.n);
    }
    throw Error(ErrorCode::bad_kind, "header: unknown kind");
}

/// Checks the byte count against the header and returns the payload view.
std::span<const uint8_t> payload_of(std::span<const uint8_t> in,
                                    const Header& h) {
    const uint64_t want = expected_bytes(h);
    if (in.size() < want)
        throw Error(ErrorCode::truncated, "payload: truncated");
    if (in.size() > want)
        throw Error(ErrorCode::length_mismatch, "payload: trailing bytes");
    return in.subspan(kHeaderBytes);
}

Header expect_kind(std::span<const uint8_t> in, Kind kind) {
    const Header h = peek_header(in);
    if (h.kind != kind)
        throw Error(ErrorCode::bad_kind, "payload: unexpected kind");
    return h;
}

void check_word(TorusWord w, const ParamSet& ps) {
    if ((w & ~ps.word_mask()) != 0)
        throw Error(ErrorCode::bad_value, "payload: torus word out of range");
}

TorusPoly get_poly(const uint8_t* p, uint32_t n, const ParamSet& ps) {
    TorusPoly out(n);
    for (uint32_t i = 0; i < n; ++i) {
        out[i] = get_u32(p + 4 * i);
        check_word(out[i], ps);
    }
    return out;
}

void put_poly(Bytes& out, const TorusPoly& poly, const ParamSet& ps) {
    for (TorusWord w : poly) {
        check_word(w, ps);
        put_u32(out, w);
    }
}

}  // namespace

ParamSet Header::params() const {
    ParamSet ps;
    ps.log2_q = log2_q;
    ps.n = n;
    ps.k = 1;
    ps.sigma = 0.0;
    ps.p = p;
    return ps;
}

Header peek_header(std::span<const uint8_t> in) {
    if (in.size() < kHeaderBytes)
        throw Error(ErrorCode::truncated, "header: short read");
    if (std::memcmp(in.data(), kMagic, 4) != 0)
        throw Error(ErrorCode::bad_magic, "header: bad magic");
    if (in[4] != kVersion)
        throw Error(ErrorCode::bad_version, "header: unsupported version");
    if (in[5] < 1 || in[5] > 4)
        throw Error(ErrorCode::bad_kind, "header: unknown kind");
    Header h;
    h.kind = static_cast<Kind>(in[5]);
    h.log2_q = in[6];
    if (in[7] != 0)
        throw Error(ErrorCode::bad_value, "header: reserved byte nonzero");
    h.n = get_u16(in.data() + 8);
    h.p = get_u32(in.data() + 10);
    h.count = get_u32(in.data() + 14);
    if (h.log2_q < 1 || h.log2_q > 32)
        throw Error(ErrorCode::bad_value, "header: log2_q out of range");
    if (h.n == 0 || !std::has_single_bit(h.n))
        throw Error(ErrorCode::bad_value, "header: N not a power of two");
    if (h.p < 2 || !std::has_single_bit(h.p) ||
        uint64_t{h.p} > (uint64_t{1} << h.log2_q))
        throw Error(ErrorCode::bad_value, "header: p invalid");
    return h;
}

Bytes serialize_params(const ParamSet& ps) {
    ParamSet checked;
    try {
        checked = validate(ps);
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::bad_value, e.what());
    }
    Bytes out;
    out.reserve(params_bytes());
    put_header(out, Kind::params, checked, 1);
    put_u64(out, std::bit_cast<uint64_t>(checked.sigma));
    put_u32(out, checked.k);
    return out;
}

ParamSet deserialize_params(std::span<const uint8_t> in) {
    const Header h = expect_kind(in, Kind::params);
    if (h.count != 1)
        throw Error(ErrorCode::bad_value, "params: count must be 1");
    const auto payload = payload_of(in, h);
    ParamSet ps = h.params();
    ps.sigma = std::bit_cast<double>(get_u64(payload.data()));
    ps.k = get_u32(payload.data() + 8);
    try {
        return validate(ps);
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorCode::bad_value, e.what());
    }
}

Bytes serialize_trlwe_batch(const std::vector<TrlweCiphertext>& cts,
                            const ParamSet& ps) {
    if (cts.size() > 0xffffffffull)
        throw Error(ErrorCode::bad_value, "trlwe batch: count too large");
    Bytes out;
    out.reserve(trlwe_bytes(ps.n, static_cast<uint32_t>(cts.size())));
    put_header(out, Kind::trlwe_batch, ps, static_cast<uint32_t>(cts.size()));
    for (const auto& ct : cts) {
        if (ct.a.size() != ps.n || ct.b.size() != ps.n)
            throw Error(ErrorCode::bad_value, "trlwe batch: inconsistent N");
        put_poly(out, ct.a, ps);
        put_poly(out, ct.b, ps);
    }
    return out;
}

TrlweBatch deserialize_trlwe_batch(std::span<const uint8_t> in) {
    const Header h = expect_kind(in, Kind::trlwe_batch);
    const auto payload = payload_of(in, h);
    const ParamSet ps = h.params();
    TrlweBatch batch{h, {}};
    batch.cts.reserve(h.count);
    const uint8_t* p = payload.data();
    for (uint32_t c = 0; c < h.count; ++c) {
        TrlweCiphertext ct;
        ct.a = get_poly(p, h.n, ps);
        p += 4 * h.n;
        ct.b = get_poly(p, h.n, ps);
        p += 4 * h.n;
        batch.cts.push_back(std::move(ct));
    }
    return batch;
}

Bytes serialize_tlwe_batch(const std::vector<TlweCiphertext>& cts,
                           const ParamSet& ps) {
    if (cts.size() > 0xffffffffull)
        throw Error(ErrorCode::bad_value, "tlwe batch: count too large");
    Bytes out;
    out.reserve(tlwe_bytes(ps.n, static_cast<uint32_t>(cts.size())));
    put_header(out, Kind::tlwe_batch, ps, static_cast<uint32_t>(cts.size()));
    for (const auto& ct : cts) {
        if (ct.a.size() != ps.n)
            throw Error(ErrorCode::bad_value, "tlwe batch: inconsistent N");
        put_poly(out, ct.a, ps);
        check_word(ct.b, ps);
        put_u32(out, ct.b);
    }
    return out;
}

TlweBatch deserialize_tlwe_batch(std::span<const uint8_t> in) {
    const Header h = expect_kind(in, Kind::tlwe_batch);
    const auto payload = payload_of(in, h);
    const ParamSet ps = h.params();
    TlweBatch batch{h, {}};
    batch.cts.reserve(h.count);
    const uint8_t* p = payload.data();
    for (uint32_t c = 0; c < h.count; ++c) {
        TlweCiphertext ct;
        ct.a = get_poly(p, h.n, ps);
        p += 4 * h.n;
        ct.b = get_u32(p);
        p += 4;
        check_word(ct.b, ps);
        batch.cts.push_back(std::move(ct));
    }
    return batch;
}

Bytes serialize_secret_key(const BinaryPoly& s, const ParamSet& ps) {
    if (s.size() != ps.n)
        throw Error(ErrorCode::bad_value, "secret key: length mismatch");
    Bytes out;
    out.reserve(key_bytes(ps.n));
    put_header(out, Kind::secret_key, ps, 1);
    uint8_t acc = 0;
    for (uint32_t i = 0; i < ps.n; ++i) {
        if (s[i] > 1)
            throw Error(ErrorCode::bad_value, "secret key: non-binary bit");
        acc |= static_cast<uint8_t>(s[i] << (i % 8));
        if (i % 8 == 7) {
            out.push_back(acc);
            acc = 0;
        }
    }
    if (ps.n % 8 != 0) out.push_back(acc);
    return out;
}

SecretKey deserialize_secret_key(std::span<const uint8_t> in) {
    const Header h = expect_kind(in, Kind::secret_key);
    if (h.count != 1)
        throw Error(ErrorCode::bad_value, "secret key: count must be 1");
    const auto payload = payload_of(in, h);
    SecretKey key{h, BinaryPoly(h.n)};
    for (uint32_t i = 0; i < h.n; ++i)
        key.s[i] = (payload[i / 8] >> (i % 8)) & 1;
    const uint32_t tail = h.n % 8;
    if (tail != 0 && (payload[h.n / 8] >> tail) != 0)
        throw Error(ErrorCode::bad_value, "secret key: padding bits set");
    return key;
}

}  // namespace tsbc::wire
