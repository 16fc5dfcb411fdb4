#include "tsbc/polymul.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace tsbc {

DwtPlan::DwtPlan(uint32_t n) : n_(n) {
    if (n < 2 || !std::has_single_bit(n))
        throw std::invalid_argument("dwt: size must be a power of two >= 2");
    log2n_ = static_cast<uint32_t>(std::countr_zero(n));

    bitrev_.assign(n, 0);
    for (uint32_t i = 1; i < n; ++i)
        bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1u) << (log2n_ - 1));

    const double pi = std::numbers::pi;
    roots_.resize(n / 2);
    for (uint32_t k = 0; k < n / 2; ++k)
        roots_[k] = std::polar(1.0, -2.0 * pi * k / n);

    weights_.resize(n);
    inv_weights_.resize(n);
    for (uint32_t x = 0; x < n; ++x) {
        weights_[x] = std::polar(1.0, pi * x / n);
        inv_weights_[x] = std::conj(weights_[x]) / static_cast<double>(n);
    }
}

const DwtPlan& DwtPlan::shared(uint32_t n) {
    static std::mutex mu;
    static std::map<uint32_t, std::unique_ptr<DwtPlan>> plans;
    std::lock_guard lk(mu);
    auto& slot = plans[n];
    if (!slot) slot = std::make_unique<DwtPlan>(n);
    return *slot;
}

void DwtPlan::fft(std::vector<std::complex<double>>& v, bool inverse) const {
    for (uint32_t i = 0; i < n_; ++i)
        if (i < bitrev_[i]) std::swap(v[i], v[bitrev_[i]]);
    for (uint32_t len = 2; len <= n_; len <<= 1) {
        const uint32_t half = len / 2;
        const uint32_t step = n_ / len;
        for (uint32_t start = 0; start < n_; start += len) {
            for (uint32_t j = 0; j < half; ++j) {
                auto w = roots_[j * step];
                if (inverse) w = std::conj(w);
                const auto u = v[start + j];
                const auto t = w * v[start + j + half];
                v[start + j] = u + t;
                v[start + j + half] = u - t;
            }
        }
    }
}

FourierPoly dwt_forward(std::span<const double> f, const DwtPlan& plan) {
    if (f.size() != plan.size())
        throw std::invalid_argument("dwt_forward: plan/input length mismatch");
    FourierPoly v(plan.size());
    for (uint32_t x = 0; x < plan.size(); ++x)
        v[x] = plan.weights_[x] * f[x];
    plan.fft(v, false);
    plan.forward_count_.fetch_add(1, std::memory_order_relaxed);
    return v;
}

FourierPoly dwt_forward(const TorusPoly& f, const DwtPlan& plan,
                        const ParamSet& ps) {
    std::vector<double> buf(f.size());
    for (size_t i = 0; i < f.size(); ++i)
        buf[i] = static_cast<double>(centered(f[i], ps));
    return dwt_forward(std::span<const double>(buf), plan);
}

FourierPoly dwt_forward(const BinaryPoly& f, const DwtPlan& plan) {
    std::vector<double> buf(f.size());
    for (size_t i = 0; i < f.size(); ++i) buf[i] = f[i];
    return dwt_forward(std::span<const double>(buf), plan);
}

std::vector<double> dwt_inverse(const FourierPoly& f, const DwtPlan& plan) {
    if (f.size() != plan.size())
        throw std::invalid_argument("dwt_inverse: plan/input length mismatch");
    FourierPoly v = f;
    plan.fft(v, true);
    std::vector<double> out(plan.size());
    for (uint32_t x = 0; x < plan.size(); ++x)
        out[x] = (v[x] * plan.inv_weights_[x]).real();
    return out;
}

FourierPoly pointwise_mul(const FourierPoly& f, const FourierPoly& g) {
    if (f.size() != g.size())
        throw std::invalid_argument("pointwise_mul: length mismatch");
    FourierPoly out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = f[i] * g[i];
    return out;
}

TorusPoly negacyclic_mul_naive(const TorusPoly& x, const BinaryPoly& y,
                               const ParamSet& ps) {
    const uint32_t n = ps.n;
    if (x.size() != n || y.size() != n)
        throw std::invalid_argument("negacyclic_mul_naive: length mismatch");
    TorusPoly c(n, 0);
    for (uint32_t h = 0; h < n; ++h) {
        TorusWord acc = 0;
        for (uint32_t i = 0; i <= h; ++i)
            if (y[i]) acc = word_add(acc, x[h - i], ps);
        for (uint32_t i = h + 1; i < n; ++i)
            if (y[i]) acc = word_sub(acc, x[n + h - i], ps);
        c[h] = acc;
    }
    return c;
}

FourierKeyCache::FourierKeyCache(BinaryPoly key) : key_(std::move(key)) {}

const FourierPoly& FourierKeyCache::transform(const DwtPlan& plan) const {
    if (!warm_.load(std::memory_order_acquire)) {
        std::lock_guard lk(mu_);
        if (!warm_.load(std::memory_order_relaxed)) {
            if (key_.size() != plan.size())
                throw std::invalid_argument("key cache: plan/key length mismatch");
            transformed_ = dwt_forward(key_, plan);
            warm_.store(true, std::memory_order_release);
        }
    }
    if (transformed_.size() != plan.size())
        throw std::invalid_argument("key cache: plan/key length mismatch");
    return transformed_;
}

TorusPoly negacyclic_mul(const TorusPoly& x, const FourierKeyCache& key,
                         const DwtPlan& plan, const ParamSet& ps) {
    if (ps.n != plan.size() || x.size() != ps.n)
        throw std::invalid_argument("negacyclic_mul: length mismatch");
    // Centered inputs have magnitude <= q/2, so intermediate values stay
    // below 2^((log2_q - 1) + log2 N); exactness needs that within a double
    // mantissa.
    const uint32_t log2n = static_cast<uint32_t>(std::countr_zero(ps.n));
    if (ps.log2_q - 1 + log2n > 52)
        throw std::invalid_argument("negacyclic_mul: q*N exceeds double precision");

    const auto fx = dwt_forward(x, plan, ps);
    const auto& fk = key.transform(plan);
    const auto vals = dwt_inverse(pointwise_mul(fx, fk), plan);

    TorusPoly out(ps.n);
    for (uint32_t i = 0; i < ps.n; ++i)
        out[i] = to_word(static_cast<int64_t>(std::floor(vals[i] + 0.5)), ps);
    return out;
}

double rrmse(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("rrmse: length mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        num += d * d;
        den += x[i] * x[i];
    }
    if (den == 0.0) throw std::invalid_argument("rrmse: zero reference vector");
    return std::sqrt(num / static_cast<double>(x.size())) / std::sqrt(den);
}

}  // namespace tsbc
