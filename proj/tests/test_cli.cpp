#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tsbc/service.hpp"
#include "tsbc/wire.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = TSBC_CLI_PATH;

struct TempDir {
    fs::path path;

    TempDir() {
        std::string tpl = (fs::temp_directory_path() / "tsbc-cli-XXXXXX").string();
        REQUIRE(mkdtemp(tpl.data()) != nullptr);
        path = tpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }

    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    REQUIRE(out.good());
}

std::vector<uint8_t> pattern_bytes(size_t n) {
    std::vector<uint8_t> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = static_cast<uint8_t>(0x5A ^ (i * 131));
    return out;
}

const std::string kSeedA =
    "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";
const std::string kSeedB =
    "202122232425262728292a2b2c2d2e2f303132333435363738393a3b3c3d3e3f";

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("keygen") == 1);                       // --out missing
    CHECK(run("keygen --out x --no-such-flag") == 1);
    CHECK(run("bench --suite nosuch --out x") == 1);
}

TEST_CASE("keygen determinism") {
    TempDir tmp;
    CHECK(run("keygen --seed " + kSeedA + " --out " + tmp.file("k1.bin")) == 0);
    CHECK(run("keygen --seed " + kSeedA + " --out " + tmp.file("k2.bin")) == 0);
    CHECK(run("keygen --seed " + kSeedB + " --out " + tmp.file("k3.bin")) == 0);
    CHECK(run("keygen --out " + tmp.file("k4.bin")) == 0);
    CHECK(run("keygen --out " + tmp.file("k5.bin")) == 0);

    const auto k1 = read_bytes(tmp.file("k1.bin"));
    CHECK(k1.size() == 146);  // 18-byte header + 1024 bits
    CHECK(k1 == read_bytes(tmp.file("k2.bin")));
    CHECK(k1 != read_bytes(tmp.file("k3.bin")));
    CHECK(read_bytes(tmp.file("k4.bin")) != read_bytes(tmp.file("k5.bin")));

    // the file parses as a proper key object
    const auto key = tsbc::wire::deserialize_secret_key(k1);
    CHECK(key.header.n == 1024);
}

TEST_CASE("ciphertext files are deterministic under a fixed seed") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    write_bytes(tmp.file("msg"), pattern_bytes(128));  // 1024 bits

    const std::string base = "encrypt --key " + tmp.file("key") + " --in " +
                             tmp.file("msg");
    CHECK(run(base + " --seed " + kSeedB + " --out " + tmp.file("c1")) == 0);
    CHECK(run(base + " --seed " + kSeedB + " --out " + tmp.file("c2")) == 0);
    CHECK(run(base + " --seed " + kSeedA + " --out " + tmp.file("c3")) == 0);
    CHECK(run(base + " --out " + tmp.file("c4")) == 0);
    CHECK(run(base + " --out " + tmp.file("c5")) == 0);

    const auto c1 = read_bytes(tmp.file("c1"));
    CHECK(c1.size() == 8210);  // one TRLWE ciphertext
    CHECK(c1 == read_bytes(tmp.file("c2")));
    CHECK(c1 != read_bytes(tmp.file("c3")));
    CHECK(read_bytes(tmp.file("c4")) != read_bytes(tmp.file("c5")));
}

TEST_CASE("baseline tlwe encryption writes the reference layout") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    write_bytes(tmp.file("msg"), pattern_bytes(128));

    CHECK(run("encrypt --baseline-tlwe --key " + tmp.file("key") + " --in " +
              tmp.file("msg") + " --seed " + kSeedB + " --out " +
              tmp.file("ct")) == 0);
    const auto ct = read_bytes(tmp.file("ct"));
    CHECK(ct.size() == 4198418);  // 1024 ciphertexts of N+1 words

    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("ct") +
              " --out " + tmp.file("back")) == 0);
    CHECK(read_bytes(tmp.file("back")) == read_bytes(tmp.file("msg")));
}

TEST_CASE("full local pipeline recovers the plaintext") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    const auto msg = pattern_bytes(512);  // 4096 bits -> 4 ciphertexts
    write_bytes(tmp.file("msg"), msg);

    REQUIRE(run("encrypt --key " + tmp.file("key") + " --in " + tmp.file("msg") +
                " --seed " + kSeedB + " --out " + tmp.file("ct")) == 0);
    CHECK(read_bytes(tmp.file("ct")).size() == 18 + 4 * 8192);

    REQUIRE(run("extract --in " + tmp.file("ct") + " --out " +
                tmp.file("ex")) == 0);
    const auto ex = read_bytes(tmp.file("ex"));
    const auto header = tsbc::wire::peek_header(ex);
    CHECK(header.kind == tsbc::wire::Kind::tlwe_batch);
    CHECK(header.count == 4096);

    // extraction is pure data movement: a second run is byte-identical
    REQUIRE(run("extract --in " + tmp.file("ct") + " --out " +
                tmp.file("ex2")) == 0);
    CHECK(ex == read_bytes(tmp.file("ex2")));

    // both ciphertext kinds decrypt back to the message
    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("ex") +
              " --out " + tmp.file("from_tlwe")) == 0);
    CHECK(read_bytes(tmp.file("from_tlwe")) == msg);
    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("ct") +
              " --out " + tmp.file("from_trlwe")) == 0);
    CHECK(read_bytes(tmp.file("from_trlwe")) == msg);
}

TEST_CASE("decrypt trims padding to the requested bit count") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    const auto msg = pattern_bytes(32);  // 256 bits, padded to one block
    write_bytes(tmp.file("msg"), msg);

    REQUIRE(run("encrypt --key " + tmp.file("key") + " --in " + tmp.file("msg") +
                " --seed " + kSeedB + " --out " + tmp.file("ct")) == 0);
    CHECK(read_bytes(tmp.file("ct")).size() == 8210);  // still one block

    CHECK(run("decrypt --bits 256 --key " + tmp.file("key") + " --in " +
              tmp.file("ct") + " --out " + tmp.file("back")) == 0);
    CHECK(read_bytes(tmp.file("back")) == msg);

    // untrimmed output carries the zero padding
    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("ct") +
              " --out " + tmp.file("padded")) == 0);
    const auto padded = read_bytes(tmp.file("padded"));
    CHECK(padded.size() == 128);
    CHECK(std::vector<uint8_t>(padded.begin(), padded.begin() + 32) == msg);
}

TEST_CASE("wrong key scrambles the plaintext") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    REQUIRE(run("keygen --seed " + kSeedB + " --out " + tmp.file("rogue")) == 0);
    write_bytes(tmp.file("msg"), pattern_bytes(128));

    REQUIRE(run("encrypt --key " + tmp.file("key") + " --in " + tmp.file("msg") +
                " --out " + tmp.file("ct")) == 0);
    REQUIRE(run("decrypt --key " + tmp.file("rogue") + " --in " +
                tmp.file("ct") + " --out " + tmp.file("back")) == 0);
    CHECK(read_bytes(tmp.file("back")) != read_bytes(tmp.file("msg")));
}

TEST_CASE("custom parameter files flow through the pipeline") {
    TempDir tmp;
    CHECK(run("params --out " + tmp.file("p.bin")) == 0);
    const auto defaults = tsbc::wire::deserialize_params(read_bytes(tmp.file("p.bin")));
    CHECK(defaults == tsbc::lvl1_default());

    CHECK(run("params --log2-q 16 --n 64 --sigma-log2 -9 --p 2 --out " +
              tmp.file("small.bin")) == 0);
    REQUIRE(run("keygen --params-file " + tmp.file("small.bin") + " --seed " +
                kSeedA + " --out " + tmp.file("key")) == 0);
    CHECK(read_bytes(tmp.file("key")).size() == 18 + 8);

    write_bytes(tmp.file("msg"), pattern_bytes(8));  // one 64-bit block
    REQUIRE(run("encrypt --params-file " + tmp.file("small.bin") + " --key " +
                tmp.file("key") + " --in " + tmp.file("msg") + " --seed " +
                kSeedB + " --out " + tmp.file("ct")) == 0);
    CHECK(read_bytes(tmp.file("ct")).size() == 18 + 8 * 64);

    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("ct") +
              " --out " + tmp.file("back")) == 0);
    CHECK(read_bytes(tmp.file("back")) == read_bytes(tmp.file("msg")));

    CHECK(run("params --n 1000 --out " + tmp.file("bad.bin")) == 1);
}

TEST_CASE("error paths map to documented exit codes") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);

    // missing input file: I/O error
    CHECK(run("encrypt --key " + tmp.file("key") + " --in " +
              tmp.file("nope") + " --out " + tmp.file("x")) == 2);
    CHECK(run("decrypt --key " + tmp.file("nope") + " --in " +
              tmp.file("nope") + " --out " + tmp.file("x")) == 2);

    // empty plaintext: usage error
    write_bytes(tmp.file("empty"), {});
    CHECK(run("encrypt --key " + tmp.file("key") + " --in " +
              tmp.file("empty") + " --out " + tmp.file("x")) == 1);

    // wrong wire kind: format error
    write_bytes(tmp.file("msg"), pattern_bytes(16));
    CHECK(run("decrypt --key " + tmp.file("key") + " --in " + tmp.file("key") +
              " --out " + tmp.file("x")) == 3);
    CHECK(run("extract --in " + tmp.file("key") + " --out " + tmp.file("x")) == 3);

    // corrupt ciphertext: format error
    REQUIRE(run("encrypt --key " + tmp.file("key") + " --in " + tmp.file("msg") +
                " --out " + tmp.file("ct")) == 0);
    auto ct = read_bytes(tmp.file("ct"));
    ct[0] = 'X';
    write_bytes(tmp.file("ct_bad"), ct);
    CHECK(run("decrypt --key " + tmp.file("key") + " --in " +
              tmp.file("ct_bad") + " --out " + tmp.file("x")) == 3);

    // unreachable server: I/O error
    CHECK(run("extract --in " + tmp.file("ct") + " --out " + tmp.file("x") +
              " --connect 127.0.0.1:1 --timeout-ms 500") == 2);
}

TEST_CASE("remote extraction matches local extraction") {
    TempDir tmp;
    REQUIRE(run("keygen --seed " + kSeedA + " --out " + tmp.file("key")) == 0);
    write_bytes(tmp.file("msg"), pattern_bytes(128));
    REQUIRE(run("encrypt --key " + tmp.file("key") + " --in " + tmp.file("msg") +
                " --seed " + kSeedB + " --out " + tmp.file("ct")) == 0);
    REQUIRE(run("extract --in " + tmp.file("ct") + " --out " +
                tmp.file("local")) == 0);

    const uint16_t port =
        static_cast<uint16_t>(20000 + (::getpid() % 20000));
    const std::string serve_cmd =
        kCli + " serve --bind 127.0.0.1:" + std::to_string(port) +
        " >/dev/null 2>&1 & echo $! > " + tmp.file("pid");
    REQUIRE(std::system(serve_cmd.c_str()) == 0);

    bool up = false;
    for (int i = 0; i < 100 && !up; ++i) {
        try {
            up = tsbc::service::ping({"127.0.0.1", port}, 200);
        } catch (const tsbc::service::Error&) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    }

    int rc = -1;
    if (up)
        rc = run("extract --in " + tmp.file("ct") + " --out " +
                 tmp.file("remote") + " --connect 127.0.0.1:" +
                 std::to_string(port));
    const int killed =
        std::system(("kill $(cat " + tmp.file("pid") + ") 2>/dev/null").c_str());
    (void)killed;

    REQUIRE(up);
    CHECK(rc == 0);
    CHECK(read_bytes(tmp.file("remote")) == read_bytes(tmp.file("local")));
}

TEST_CASE("bench reports parse and agree across formats") {
    TempDir tmp;

    CHECK(run("bench --suite polymul --iterations 5 --row-budget-s 0.2 "
              "--seed " + kSeedA + " --json --out " + tmp.file("p.json")) == 0);

    const auto report = nlohmann::json::parse(read_bytes(tmp.file("p.json")));
    REQUIRE(report.is_array());
    REQUIRE(report.size() == 2);
    for (const auto& row : report) {
        CHECK(row.at("suite") == "polymul");
        CHECK(row.at("iterations").get<uint64_t>() >= 1);
        const double phases = row.at("forward_ms").get<double>() +
                              row.at("pointwise_ms").get<double>() +
                              row.at("inverse_ms").get<double>();
        CHECK(phases <= row.at("total_ms").get<double>() + 1e-9);
    }

    // same seed, same work: the CSV of a fresh run carries the same shape
    CHECK(run("bench --suite sampler --iterations 3 --row-budget-s 0.1 "
              "--seed " + kSeedA + " --csv --out " + tmp.file("s.csv")) == 0);
    std::ifstream csv(tmp.file("s.csv"));
    std::string header_line;
    REQUIRE(std::getline(csv, header_line));
    CHECK(header_line.find("suite,config,bits,iterations") == 0);
    int rows = 0;
    for (std::string line; std::getline(csv, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 6);  // {uniform, polar, ziggurat} x {hash-stream, os-entropy}

    // json and csv are mutually exclusive
    CHECK(run("bench --suite sampler --json --csv --out " + tmp.file("x")) == 1);
}
