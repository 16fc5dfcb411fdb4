#include <benchmark/benchmark.h>

#include <vector>

#include "tsbc/adapter.hpp"
#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/polymul.hpp"
#include "tsbc/rlwe.hpp"
#include "tsbc/rng.hpp"

namespace {

using namespace tsbc;

const ParamSet kPs = lvl1_default();

Seed fixed_seed() {
    Seed s{};
    for (size_t i = 0; i < s.size(); ++i) s[i] = static_cast<uint8_t>(i * 7 + 3);
    return s;
}

void BM_StreamFill(benchmark::State& state) {
    RandomStream src(fixed_seed());
    std::vector<uint8_t> buf(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        src.fill(buf.data(), buf.size());
        benchmark::DoNotOptimize(buf.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            state.range(0));
}
BENCHMARK(BM_StreamFill)->Arg(64)->Arg(4096);

void BM_UniformPoly(benchmark::State& state) {
    RandomStream src(fixed_seed());
    for (auto _ : state) {
        TorusPoly p = uniform_poly(src, kPs);
        benchmark::DoNotOptimize(p.data());
    }
}
BENCHMARK(BM_UniformPoly);

void BM_GaussianPoly(benchmark::State& state) {
    RandomStream src(fixed_seed());
    GaussianSampler g(state.range(0) == 0 ? GaussianSampler::Algorithm::polar
                                          : GaussianSampler::Algorithm::ziggurat,
                      kPs.sigma_q());
    for (auto _ : state) {
        TorusPoly p = g.sample_poly(src, kPs);
        benchmark::DoNotOptimize(p.data());
    }
}
BENCHMARK(BM_GaussianPoly)->Arg(0)->Arg(1)->ArgNames({"ziggurat"});

void BM_DwtForward(benchmark::State& state) {
    const DwtPlan& plan = DwtPlan::shared(kPs.n);
    RandomStream src(fixed_seed());
    const TorusPoly x = uniform_poly(src, kPs);
    for (auto _ : state) {
        FourierPoly f = dwt_forward(x, plan, kPs);
        benchmark::DoNotOptimize(f.data());
    }
}
BENCHMARK(BM_DwtForward);

void BM_NegacyclicMul(benchmark::State& state) {
    const bool reuse = state.range(0) == 1;
    const DwtPlan& plan = DwtPlan::shared(kPs.n);
    RandomStream src(fixed_seed());
    const BinaryPoly key = uniform_binary_poly(src, kPs.n);
    const TorusPoly x = uniform_poly(src, kPs);
    FourierKeyCache warm(key);
    warm.transform(plan);
    for (auto _ : state) {
        if (reuse) {
            TorusPoly out = negacyclic_mul(x, warm, plan, kPs);
            benchmark::DoNotOptimize(out.data());
        } else {
            FourierKeyCache cold(key);
            TorusPoly out = negacyclic_mul(x, cold, plan, kPs);
            benchmark::DoNotOptimize(out.data());
        }
    }
}
BENCHMARK(BM_NegacyclicMul)->Arg(1)->Arg(0)->ArgNames({"reuse"});

void BM_TlweEncrypt(benchmark::State& state) {
    RandomStream src(fixed_seed());
    GaussianSampler g(GaussianSampler::Algorithm::ziggurat, kPs.sigma_q());
    const LweSecretKey key = lwe_keygen(src, kPs);
    for (auto _ : state) {
        TlweCiphertext ct = tlwe_encrypt(1, key, src, g, kPs);
        benchmark::DoNotOptimize(ct.a.data());
    }
}
BENCHMARK(BM_TlweEncrypt);

void BM_TrlweEncrypt(benchmark::State& state) {
    RandomStream src(fixed_seed());
    GaussianSampler g(GaussianSampler::Algorithm::ziggurat, kPs.sigma_q());
    const RlweSecretKey key = rlwe_keygen(src, kPs);
    key.cache().transform(DwtPlan::shared(kPs.n));
    const MessagePoly m(kPs.n, 1);
    for (auto _ : state) {
        TrlweCiphertext ct = trlwe_encrypt(m, key, src, g, kPs);
        benchmark::DoNotOptimize(ct.b.data());
    }
}
BENCHMARK(BM_TrlweEncrypt);

void BM_SampleExtractAll(benchmark::State& state) {
    RandomStream src(fixed_seed());
    GaussianSampler g(GaussianSampler::Algorithm::ziggurat, kPs.sigma_q());
    const RlweSecretKey key = rlwe_keygen(src, kPs);
    const TrlweCiphertext ct =
        trlwe_encrypt(MessagePoly(kPs.n, 0), key, src, g, kPs);
    for (auto _ : state) {
        ExtractionResult out = trlwe_to_tlwes(ct, kPs);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_SampleExtractAll);

}  // namespace

BENCHMARK_MAIN();
