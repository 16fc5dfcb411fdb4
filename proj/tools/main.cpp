#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bench.hpp"
#include "tsbc/adapter.hpp"
#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/rlwe.hpp"
#include "tsbc/rng.hpp"
#include "tsbc/service.hpp"
#include "tsbc/torus.hpp"
#include "tsbc/wire.hpp"

namespace {

using namespace tsbc;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return data;
}

void write_file(const std::string& path, std::span<const uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::vector<uint8_t> bytes_to_bits(std::span<const uint8_t> bytes) {
    std::vector<uint8_t> bits;
    bits.reserve(bytes.size() * 8);
    for (const uint8_t b : bytes)
        for (int j = 0; j < 8; ++j) bits.push_back((b >> j) & 1);
    return bits;
}

std::vector<uint8_t> bits_to_bytes(std::span<const uint8_t> bits) {
    std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        bytes[i / 8] |= static_cast<uint8_t>((bits[i] & 1) << (i % 8));
    return bytes;
}

ParamSet load_params(const std::string& path) {
    if (path.empty()) return lvl1_default();
    return wire::deserialize_params(read_file(path));
}

Seed seed_or_os(const std::string& hex) {
    return hex.empty() ? seed_from_os() : seed_from_hex(hex);
}

void check_key_matches(const wire::Header& key_header, const ParamSet& ps) {
    if (key_header.log2_q != ps.log2_q || key_header.n != ps.n ||
        key_header.p != ps.p)
        throw std::invalid_argument(
            "key file parameters do not match the active parameter set");
}

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

int cmd_keygen(const std::string& params_file, const std::string& seed_hex,
               const std::string& out) {
    const ParamSet ps = validate(load_params(params_file));
    RandomStream stream(seed_or_os(seed_hex));
    const RlweSecretKey key = rlwe_keygen(stream, ps);
    write_file(out, wire::serialize_secret_key(key.s(), ps));
    return 0;
}

int cmd_params(uint32_t log2_q, uint32_t n, int sigma_log2, uint64_t p,
               const std::string& out) {
    ParamSet ps = lvl1_default();
    ps.log2_q = log2_q;
    ps.n = n;
    ps.sigma = std::ldexp(1.0, sigma_log2);
    ps.p = p;
    write_file(out, wire::serialize_params(validate(ps)));
    return 0;
}

int cmd_encrypt(const std::string& params_file, const std::string& key_path,
                const std::string& in, const std::string& out,
                const std::string& seed_hex, bool baseline_tlwe) {
    const ParamSet ps = validate(load_params(params_file));
    const auto key_file = wire::deserialize_secret_key(read_file(key_path));
    check_key_matches(key_file.header, ps);

    const std::vector<uint8_t> plain = read_file(in);
    if (plain.empty()) throw std::invalid_argument("empty plaintext input");
    const std::vector<uint8_t> bits = bytes_to_bits(plain);

    RandomStream stream(seed_or_os(seed_hex));
    GaussianSampler g(GaussianSampler::Algorithm::ziggurat, ps.sigma_q());

    if (baseline_tlwe) {
        const LweSecretKey skey{key_file.s};
        std::vector<TlweCiphertext> cts;
        cts.reserve(bits.size());
        for (const uint8_t bit : bits)
            cts.push_back(tlwe_encrypt(bit, skey, stream, g, ps));
        write_file(out, wire::serialize_tlwe_batch(cts, ps));
    } else {
        const RlweSecretKey rkey(key_file.s);
        std::vector<TrlweCiphertext> cts;
        for (const MessagePoly& mp : bits_to_message_poly(bits, ps))
            cts.push_back(trlwe_encrypt(mp, rkey, stream, g, ps));
        write_file(out, wire::serialize_trlwe_batch(cts, ps));
    }
    return 0;
}

int cmd_decrypt(const std::string& key_path, const std::string& in,
                const std::string& out, uint64_t bits_wanted) {
    const auto key_file = wire::deserialize_secret_key(read_file(key_path));
    const std::vector<uint8_t> blob = read_file(in);
    const wire::Header header = wire::peek_header(blob);
    if (header.p != 2)
        throw std::invalid_argument("byte output requires p = 2");
    if (header.n != key_file.header.n)
        throw std::invalid_argument("key/ciphertext dimension mismatch");

    std::vector<uint8_t> bits;
    if (header.kind == wire::Kind::trlwe_batch) {
        const auto batch = wire::deserialize_trlwe_batch(blob);
        const ParamSet ps = batch.header.params();
        const RlweSecretKey rkey(key_file.s);
        for (const auto& ct : batch.cts)
            for (const uint32_t m : trlwe_decrypt(ct, rkey, ps))
                bits.push_back(static_cast<uint8_t>(m));
    } else if (header.kind == wire::Kind::tlwe_batch) {
        const auto batch = wire::deserialize_tlwe_batch(blob);
        const ParamSet ps = batch.header.params();
        const LweSecretKey skey{key_file.s};
        for (const auto& ct : batch.cts)
            bits.push_back(static_cast<uint8_t>(tlwe_decrypt(ct, skey, ps)));
    } else {
        throw wire::Error(wire::ErrorCode::bad_kind,
                          "decrypt: expected a ciphertext file");
    }

    if (bits_wanted != 0) {
        if (bits_wanted > bits.size())
            throw std::invalid_argument(
                "--bits exceeds the decrypted bit count");
        bits.resize(bits_wanted);
    }
    write_file(out, bits_to_bytes(bits));
    return 0;
}

int cmd_extract(const std::string& in, const std::string& out,
                const std::string& connect, int timeout_ms) {
    const std::vector<uint8_t> blob = read_file(in);
    const wire::Header header = wire::peek_header(blob);
    if (header.kind != wire::Kind::trlwe_batch)
        throw wire::Error(wire::ErrorCode::bad_kind,
                          "extract: expected a TRLWE batch");

    if (connect.empty()) {
        const auto batch = wire::deserialize_trlwe_batch(blob);
        const ParamSet ps = batch.header.params();
        ExtractionResult all;
        all.reserve(size_t{batch.cts.size()} * ps.n);
        for (const auto& ct : batch.cts) {
            auto part = trlwe_to_tlwes(ct, ps);
            std::move(part.begin(), part.end(), std::back_inserter(all));
        }
        write_file(out, wire::serialize_tlwe_batch(all, ps));
        return 0;
    }

    service::Client client(service::parse_endpoint(connect), timeout_ms);
    const service::Frame reply =
        client.call({service::Opcode::extract_request, blob});
    if (reply.opcode == service::Opcode::error)
        throw service::Error(
            service::Error::Cause::remote,
            std::string(reply.payload.begin(), reply.payload.end()));
    if (reply.opcode != service::Opcode::extract_response)
        throw service::Error(service::Error::Cause::protocol,
                             "unexpected reply opcode");
    wire::deserialize_tlwe_batch(reply.payload);  // reject corrupt replies
    write_file(out, reply.payload);
    return 0;
}

int cmd_serve(const std::string& bind, const std::string& params_file) {
    const ParamSet ps = validate(load_params(params_file));
    const service::Endpoint at = service::parse_endpoint(bind);
    service::Server server(at, ps);
    server.start();
    std::printf("listening on %s:%u\n",
                at.host.empty() ? "0.0.0.0" : at.host.c_str(),
                static_cast<unsigned>(server.port()));
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
}

int cmd_bench(const std::string& suite, const std::string& params_file,
              const std::string& seed_hex, uint64_t iterations,
              double row_budget_s, bool json, bool csv,
              const std::string& out) {
    const ParamSet ps = validate(load_params(params_file));
    bench::Options opt;
    opt.iterations = iterations;
    opt.row_budget_s = row_budget_s;
    opt.seed = seed_or_os(seed_hex);

    std::vector<bench::Row> rows;
    if (suite == "sampler")
        rows = bench::run_sampler_suite(ps, opt);
    else if (suite == "polymul")
        rows = bench::run_polymul_suite(ps, opt);
    else
        rows = bench::run_encrypt_suite(ps, opt);

    const std::string text = json ? bench::to_json(rows)
                             : csv ? bench::to_csv(rows)
                                   : bench::to_table(rows);
    if (out.empty())
        std::cout << text;
    else
        write_file(out, {reinterpret_cast<const uint8_t*>(text.data()),
                         text.size()});

    const auto violations = bench::check_orderings(rows);
    for (const auto& v : violations)
        std::cerr << "ordering check failed: " << v << "\n";
    return violations.empty() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"torus LWE client pipeline with a sample-extraction service"};
    app.require_subcommand(1);
    int rc = 0;

    std::string params_file, seed_hex, in, out, key_path, connect, bind;
    bool baseline_tlwe = false, json = false, csv = false;
    uint64_t iterations = 100, bits_wanted = 0;
    int timeout_ms = service::kDefaultTimeoutMs;
    double row_budget_s = 2.0;
    uint32_t par_log2_q = 32, par_n = 1024;
    int par_sigma_log2 = -25;
    uint64_t par_p = 2;
    std::string suite;

    auto* keygen = app.add_subcommand("keygen", "generate a secret key file");
    keygen->add_option("--params-file", params_file, "parameter file");
    keygen->add_option("--seed", seed_hex, "64 hex chars; deterministic keys");
    keygen->add_option("--out", out, "key file path")->required();
    keygen->callback([&] { rc = cmd_keygen(params_file, seed_hex, out); });

    auto* params = app.add_subcommand("params", "write a parameter file");
    params->add_option("--log2-q", par_log2_q, "modulus bit width (32)");
    params->add_option("--n", par_n, "ring dimension (1024)");
    params->add_option("--sigma-log2", par_sigma_log2,
                       "noise stddev exponent (-25)");
    params->add_option("--p", par_p, "plaintext modulus (2)");
    params->add_option("--out", out, "parameter file path")->required();
    params->callback(
        [&] { rc = cmd_params(par_log2_q, par_n, par_sigma_log2, par_p, out); });

    auto* encrypt = app.add_subcommand("encrypt", "encrypt a file of bytes");
    encrypt->add_option("--params-file", params_file, "parameter file");
    encrypt->add_option("--key", key_path, "secret key file")->required();
    encrypt->add_option("--in", in, "plaintext input file")->required();
    encrypt->add_option("--out", out, "ciphertext output file")->required();
    encrypt->add_option("--seed", seed_hex,
                        "64 hex chars; deterministic ciphertexts");
    encrypt->add_flag("--baseline-tlwe", baseline_tlwe,
                      "per-bit TLWE instead of TRLWE");
    encrypt->callback([&] {
        rc = cmd_encrypt(params_file, key_path, in, out, seed_hex,
                         baseline_tlwe);
    });

    auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext file");
    decrypt->add_option("--key", key_path, "secret key file")->required();
    decrypt->add_option("--in", in, "ciphertext input file")->required();
    decrypt->add_option("--out", out, "plaintext output file")->required();
    decrypt->add_option("--bits", bits_wanted,
                        "keep only the first n plaintext bits");
    decrypt->callback([&] { rc = cmd_decrypt(key_path, in, out, bits_wanted); });

    auto* extract = app.add_subcommand(
        "extract", "turn a TRLWE batch into per-bit TLWE ciphertexts");
    extract->add_option("--in", in, "TRLWE batch file")->required();
    extract->add_option("--out", out, "TLWE batch output file")->required();
    extract->add_option("--connect", connect,
                        "host:port of an extraction service (default: local)");
    extract->add_option("--timeout-ms", timeout_ms, "network timeout (10000)");
    extract->callback([&] { rc = cmd_extract(in, out, connect, timeout_ms); });

    auto* serve = app.add_subcommand("serve", "run the extraction service");
    serve->add_option("--bind", bind, "host:port to listen on")->required();
    serve->add_option("--params-file", params_file, "advertised parameters");
    serve->callback([&] { rc = cmd_serve(bind, params_file); });

    auto* bench = app.add_subcommand("bench", "measure the pipeline");
    bench->add_option("--suite", suite, "sampler | polymul | encrypt")
        ->required()
        ->check(CLI::IsMember({"sampler", "polymul", "encrypt"}));
    bench->add_option("--params-file", params_file, "parameter file");
    bench->add_option("--seed", seed_hex, "64 hex chars; stream seed");
    bench->add_option("--iterations", iterations, "per-row iteration cap (100)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--row-budget-s", row_budget_s,
                      "wall-clock budget per row in seconds (2.0)");
    auto* jopt = bench->add_flag("--json", json, "emit JSON");
    auto* copt = bench->add_flag("--csv", csv, "emit CSV");
    jopt->excludes(copt);
    bench->add_option("--out", out, "write the report here instead of stdout");
    bench->callback([&] {
        rc = cmd_bench(suite, params_file, seed_hex, iterations, row_budget_s,
                       json, csv, out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const wire::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const service::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.cause()) {
            case service::Error::Cause::io:
            case service::Error::Cause::timeout:
                return 2;
            case service::Error::Cause::oversized:
                return 1;
            default:
                return 3;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
