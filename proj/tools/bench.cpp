#include "bench.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "tsbc/lwe.hpp"
#include "tsbc/polymul.hpp"
#include "tsbc/rlwe.hpp"
#include "tsbc/torus.hpp"

namespace tsbc::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

int64_t current_peak_rss_kib() {
    rusage ru{};
    if (getrusage(RUSAGE_SELF, &ru) != 0) return 0;
    return ru.ru_maxrss;
}

/// Runs body until the iteration cap or the row budget is hit (at least
/// three passes when the cap allows). Returns the executed count.
template <class F>
uint64_t run_row(const Options& opt, F&& body) {
    const auto start = Clock::now();
    uint64_t done = 0;
    while (done < opt.iterations) {
        body();
        ++done;
        if (done >= 3 &&
            ms_between(start, Clock::now()) >= opt.row_budget_s * 1000.0)
            break;
    }
    return done;
}

void finish_times(Row& r) {
    const double it = r.iterations ? static_cast<double>(r.iterations) : 1.0;
    r.uniform_ms = round6(r.uniform_ms / it);
    r.gaussian_ms = round6(r.gaussian_ms / it);
    r.polymul_ms = round6(r.polymul_ms / it);
    r.forward_ms = round6(r.forward_ms / it);
    r.pointwise_ms = round6(r.pointwise_ms / it);
    r.inverse_ms = round6(r.inverse_ms / it);
    r.total_ms = round6(r.total_ms / it);
    r.peak_rss_kib = current_peak_rss_kib();
}

std::unique_ptr<ByteSource> make_source(bool hash_stream, const Seed& seed) {
    if (hash_stream) return std::make_unique<RandomStream>(seed);
    return std::make_unique<OsEntropySource>();
}

}  // namespace

std::vector<Row> run_sampler_suite(const ParamSet& ps, const Options& opt) {
    static const struct {
        const char* alg;
        const char* source;
    } kConfigs[] = {
        {"uniform", "hash-stream"},  {"uniform", "os-entropy"},
        {"polar", "hash-stream"},    {"polar", "os-entropy"},
        {"ziggurat", "hash-stream"}, {"ziggurat", "os-entropy"},
    };

    std::vector<Row> rows;
    volatile TorusWord sink = 0;
    for (const auto& c : kConfigs) {
        Row r;
        r.suite = "sampler";
        r.config = std::string(c.alg) + "/" + c.source;
        const auto src =
            make_source(std::string_view(c.source) == "hash-stream", opt.seed);
        const bool is_uniform = std::string_view(c.alg) == "uniform";
        GaussianSampler g(std::string_view(c.alg) == "polar"
                              ? GaussianSampler::Algorithm::polar
                              : GaussianSampler::Algorithm::ziggurat,
                          ps.sigma_q());
        double phase = 0;
        r.iterations = run_row(opt, [&] {
            const auto t0 = Clock::now();
            const TorusPoly words =
                is_uniform ? uniform_poly(*src, ps) : g.sample_poly(*src, ps);
            const auto t1 = Clock::now();
            sink = sink ^ words[0];
            phase += ms_between(t0, t1);
        });
        r.uniform_words = src->uniforms_consumed();
        r.gaussian_words = src->gaussians_emitted();
        (is_uniform ? r.uniform_ms : r.gaussian_ms) = phase;
        r.total_ms = phase;
        r.bytes = uint64_t{4} * ps.n;
        finish_times(r);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<Row> run_polymul_suite(const ParamSet& ps, const Options& opt) {
    const DwtPlan& plan = DwtPlan::shared(ps.n);
    RandomStream src(opt.seed);
    const BinaryPoly keybits = uniform_binary_poly(src, ps.n);

    std::vector<Row> rows;
    volatile TorusWord sink = 0;
    for (const bool reuse : {true, false}) {
        Row r;
        r.suite = "polymul";
        r.config = reuse ? "reuse" : "on-the-fly";
        FourierKeyCache warm_cache(keybits);
        if (reuse) warm_cache.transform(plan);
        const uint64_t tf0 = plan.forward_transforms();
        r.iterations = run_row(opt, [&] {
            const TorusPoly x = uniform_poly(src, ps);
            std::optional<FourierKeyCache> cold;
            if (!reuse) cold.emplace(keybits);
            const FourierKeyCache& cache = reuse ? warm_cache : *cold;

            const auto t0 = Clock::now();
            const FourierPoly fx = dwt_forward(x, plan, ps);
            const FourierPoly& fk = cache.transform(plan);
            const auto t1 = Clock::now();
            const FourierPoly prod = pointwise_mul(fx, fk);
            const auto t2 = Clock::now();
            const std::vector<double> vals = dwt_inverse(prod, plan);
            const auto t3 = Clock::now();
            TorusPoly out(ps.n);
            for (uint32_t i = 0; i < ps.n; ++i)
                out[i] = to_word(static_cast<int64_t>(std::floor(vals[i] + 0.5)),
                                 ps);
            const auto t4 = Clock::now();

            sink = sink ^ out[0];
            r.forward_ms += ms_between(t0, t1);
            r.pointwise_ms += ms_between(t1, t2);
            r.inverse_ms += ms_between(t2, t3);
            r.total_ms += ms_between(t0, t4);
        });
        r.transforms = plan.forward_transforms() - tf0;
        r.polymul_ms = r.total_ms;
        r.bytes = uint64_t{4} * ps.n;
        finish_times(r);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<Row> run_encrypt_suite(const ParamSet& ps, const Options& opt) {
    static const struct {
        const char* name;
        bool tlwe;
        bool fast;  // hash stream + ziggurat + warm cache
    } kMethods[] = {
        {"tlwe-baseline", true, true},
        {"trlwe-unopt", false, false},
        {"trlwe-opt", false, true},
    };
    static const uint64_t kSizes[] = {256, 1024, 4096, 8192};

    const DwtPlan& plan = DwtPlan::shared(ps.n);
    RandomStream setup_src(opt.seed, /*start_block=*/uint64_t{1} << 32);
    const BinaryPoly keybits = uniform_binary_poly(setup_src, ps.n);

    std::vector<Row> rows;
    volatile TorusWord sink = 0;
    for (const auto& m : kMethods) {
        for (const uint64_t bits : kSizes) {
            Row r;
            r.suite = "encrypt";
            r.config = m.name;
            r.bits = bits;
            const BinaryPoly message =
                uniform_binary_poly(setup_src, static_cast<uint32_t>(bits));
            const auto src = make_source(m.fast, opt.seed);
            GaussianSampler g(m.fast ? GaussianSampler::Algorithm::ziggurat
                                     : GaussianSampler::Algorithm::polar,
                              ps.sigma_q());

            if (m.tlwe) {
                const LweSecretKey skey{keybits};
                r.iterations = run_row(opt, [&] {
                    const auto t0 = Clock::now();
                    for (const uint8_t bit : message) {
                        const uint64_t c0 = src->uniforms_consumed();
                        const auto u0 = Clock::now();
                        const TorusPoly a = uniform_poly(*src, ps);
                        const auto u1 = Clock::now();
                        const uint64_t c1 = src->uniforms_consumed();
                        const TorusWord e = g.sample_word(*src, ps);
                        const auto u2 = Clock::now();
                        r.uniform_words += c1 - c0;
                        TorusWord ip = 0;
                        for (uint32_t i = 0; i < ps.n; ++i)
                            if (skey.s[i]) ip = word_add(ip, a[i], ps);
                        const TorusWord b = word_add(
                            ip, word_add(encode(bit, ps), e, ps), ps);
                        sink = sink ^ b;
                        r.uniform_ms += ms_between(u0, u1);
                        r.gaussian_ms += ms_between(u1, u2);
                    }
                    r.total_ms += ms_between(t0, Clock::now());
                });
                r.gaussian_words = g.emitted();
                r.bytes = uint64_t{4} * (ps.n + 1) * bits;
            } else {
                std::vector<MessagePoly> polys =
                    bits_to_message_poly(std::vector<uint8_t>(message.begin(),
                                                              message.end()),
                                         ps);
                RlweSecretKey rkey(keybits);
                if (m.fast) rkey.cache().transform(plan);
                const uint64_t tf0 = plan.forward_transforms();
                r.iterations = run_row(opt, [&] {
                    const auto t0 = Clock::now();
                    for (const MessagePoly& mp : polys) {
                        std::optional<FourierKeyCache> cold;
                        if (!m.fast) cold.emplace(keybits);
                        const FourierKeyCache& cache =
                            m.fast ? rkey.cache() : *cold;

                        const uint64_t c0 = src->uniforms_consumed();
                        const auto u0 = Clock::now();
                        const TorusPoly a = uniform_poly(*src, ps);
                        const auto u1 = Clock::now();
                        const uint64_t c1 = src->uniforms_consumed();
                        const TorusPoly as = negacyclic_mul(a, cache, plan, ps);
                        const auto u2 = Clock::now();
                        const TorusPoly e = g.sample_poly(*src, ps);
                        const auto u3 = Clock::now();
                        r.uniform_words += c1 - c0;
                        TorusPoly b(ps.n);
                        for (uint32_t i = 0; i < ps.n; ++i)
                            b[i] = word_add(
                                as[i], word_add(encode(mp[i], ps), e[i], ps),
                                ps);
                        sink = sink ^ b[0];
                        r.uniform_ms += ms_between(u0, u1);
                        r.polymul_ms += ms_between(u1, u2);
                        r.gaussian_ms += ms_between(u2, u3);
                    }
                    r.total_ms += ms_between(t0, Clock::now());
                });
                r.gaussian_words = g.emitted();
                r.transforms = plan.forward_transforms() - tf0;
                r.bytes = uint64_t{8} * ps.n * polys.size();
            }
            finish_times(r);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::string to_csv(const std::vector<Row>& rows) {
    std::ostringstream out;
    out << "suite,config,bits,iterations,uniform_ms,gaussian_ms,polymul_ms,"
           "forward_ms,pointwise_ms,inverse_ms,total_ms,uniform_words,"
           "gaussian_words,transforms,bytes,peak_rss_kib\n";
    char buf[64];
    const auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << buf;
    };
    for (const Row& r : rows) {
        out << r.suite << ',' << r.config << ',' << r.bits << ','
            << r.iterations << ',';
        put(r.uniform_ms);
        out << ',';
        put(r.gaussian_ms);
        out << ',';
        put(r.polymul_ms);
        out << ',';
        put(r.forward_ms);
        out << ',';
        put(r.pointwise_ms);
        out << ',';
        put(r.inverse_ms);
        out << ',';
        put(r.total_ms);
        out << ',' << r.uniform_words << ',' << r.gaussian_words << ','
            << r.transforms << ',' << r.bytes << ',' << r.peak_rss_kib << '\n';
    }
    return out.str();
}

std::string to_json(const std::vector<Row>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Row& r : rows) {
        arr.push_back({{"suite", r.suite},
                       {"config", r.config},
                       {"bits", r.bits},
                       {"iterations", r.iterations},
                       {"uniform_ms", r.uniform_ms},
                       {"gaussian_ms", r.gaussian_ms},
                       {"polymul_ms", r.polymul_ms},
                       {"forward_ms", r.forward_ms},
                       {"pointwise_ms", r.pointwise_ms},
                       {"inverse_ms", r.inverse_ms},
                       {"total_ms", r.total_ms},
                       {"uniform_words", r.uniform_words},
                       {"gaussian_words", r.gaussian_words},
                       {"transforms", r.transforms},
                       {"bytes", r.bytes},
                       {"peak_rss_kib", r.peak_rss_kib}});
    }
    return arr.dump(2) + "\n";
}

std::string to_table(const std::vector<Row>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-22s %6s %6s %12s %12s %12s %12s %11s %12s\n",
                  "suite", "config", "bits", "iters", "uniform_ms",
                  "gaussian_ms", "polymul_ms", "total_ms", "transforms",
                  "bytes");
    out << line;
    for (const Row& r : rows) {
        std::snprintf(line, sizeof line,
                      "%-8s %-22s %6llu %6llu %12.4f %12.4f %12.4f %12.4f %11llu %12llu\n",
                      r.suite.c_str(), r.config.c_str(),
                      static_cast<unsigned long long>(r.bits),
                      static_cast<unsigned long long>(r.iterations),
                      r.uniform_ms, r.gaussian_ms, r.polymul_ms, r.total_ms,
                      static_cast<unsigned long long>(r.transforms),
                      static_cast<unsigned long long>(r.bytes));
        out << line;
    }
    return out.str();
}

std::vector<std::string> check_orderings(const std::vector<Row>& rows) {
    const auto find = [&](std::string_view config,
                          uint64_t bits) -> const Row* {
        for (const Row& r : rows)
            if (r.config == config && r.bits == bits) return &r;
        return nullptr;
    };
    std::vector<std::string> bad;
    const auto expect = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };

    if (const Row *a = find("reuse", 0), *b = find("on-the-fly", 0);
        a && b) {
        expect(a->forward_ms < b->forward_ms,
               "reuse forward stage should beat on-the-fly");
        expect(a->total_ms < b->total_ms,
               "reuse total should beat on-the-fly");
        expect(a->transforms * 2 == b->transforms,
               "on-the-fly should run twice the forward transforms");
    }

    for (const char* alg : {"uniform", "polar", "ziggurat"}) {
        const Row* fast = find(std::string(alg) + "/hash-stream", 0);
        const Row* slow = find(std::string(alg) + "/os-entropy", 0);
        if (fast && slow)
            expect(fast->total_ms < slow->total_ms,
                   std::string(alg) + ": hash stream should beat os entropy");
    }
    if (const Row *zig = find("ziggurat/hash-stream", 0),
        *pol = find("polar/hash-stream", 0);
        zig && pol)
        expect(zig->total_ms < pol->total_ms * 1.5,
               "ziggurat should not trail polar");

    if (const Row *opt = find("trlwe-opt", 1024),
        *unopt = find("trlwe-unopt", 1024);
        opt && unopt) {
        const Row* tlwe = find("tlwe-baseline", 1024);
        expect(opt->total_ms < unopt->total_ms,
               "optimized TRLWE should beat the slow-sampler configuration");
        if (tlwe)
            expect(unopt->total_ms < tlwe->total_ms,
                   "TRLWE should beat the per-bit TLWE baseline");
    }
    return bad;
}

}  // namespace tsbc::bench
