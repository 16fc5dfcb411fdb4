#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include "tsbc/params.hpp"
#include "tsbc/torus.hpp"

namespace tsbc {

/// Transform-domain image of a length-N real polynomial.
using FourierPoly = std::vector<std::complex<double>>;

/// Precomputed tables for the discrete weighted transform of length N:
/// twiddle factors e^{-i*2*pi*k/N} and the negacyclic twist weights
/// w_x = e^{i*pi*x/N}. Immutable after construction and shareable; the
/// forward-transform counter is instrumentation only.
class DwtPlan {
public:
    explicit DwtPlan(uint32_t n);

    uint32_t size() const noexcept { return n_; }
    uint64_t forward_transforms() const noexcept { return forward_count_; }

    /// Process-wide shared plan for ring dimension n.
    static const DwtPlan& shared(uint32_t n);

private:
    friend FourierPoly dwt_forward(std::span<const double>, const DwtPlan&);
    friend std::vector<double> dwt_inverse(const FourierPoly&, const DwtPlan&);

    void fft(std::vector<std::complex<double>>& v, bool inverse) const;

    uint32_t n_;
    uint32_t log2n_;
    std::vector<uint32_t> bitrev_;
    std::vector<std::complex<double>> roots_;        // e^{-i*2*pi*k/N}, k < N/2
    std::vector<std::complex<double>> weights_;      // w_x
    std::vector<std::complex<double>> inv_weights_;  // 1 / (w_x * N)
    mutable std::atomic<uint64_t> forward_count_{0};
};

/// Weighted forward transform F'(t) = sum_x w_x f(x) e^{-i*2*pi*t*x/N}
/// of a real coefficient vector, via an O(N log N) FFT.
FourierPoly dwt_forward(std::span<const double> f, const DwtPlan& plan);

/// Torus input, interpreted through the centered signed representative.
FourierPoly dwt_forward(const TorusPoly& f, const DwtPlan& plan,
                        const ParamSet& ps);

/// Binary ({0,1}) input.
FourierPoly dwt_forward(const BinaryPoly& f, const DwtPlan& plan);

/// Inverse weighted transform f(x) = 1/(w_x N) sum_t F'(t) e^{i*2*pi*t*x/N};
/// returns the real coefficient vector.
std::vector<double> dwt_inverse(const FourierPoly& f, const DwtPlan& plan);

/// Element-wise complex product. Throws on length mismatch.
FourierPoly pointwise_mul(const FourierPoly& f, const FourierPoly& g);

/// Exact negacyclic product x * y in Z_q[X]/(X^N + 1), integer arithmetic,
/// O(N^2). Ground-truth oracle for the transform path.
TorusPoly negacyclic_mul_naive(const TorusPoly& x, const BinaryPoly& y,
                               const ParamSet& ps);

/// Transformed secret key, computed once on first use and reused across
/// multiplications. The key is immutable after construction.
class FourierKeyCache {
public:
    explicit FourierKeyCache(BinaryPoly key);

    /// Transform of the key under this plan; runs dwt_forward on first call.
    const FourierPoly& transform(const DwtPlan& plan) const;

    bool warm() const noexcept { return warm_.load(std::memory_order_acquire); }
    const BinaryPoly& key() const noexcept { return key_; }

private:
    BinaryPoly key_;
    mutable std::mutex mu_;
    mutable FourierPoly transformed_;
    mutable std::atomic<bool> warm_{false};
};

/// Negacyclic product via the transform path with key reuse: exactly one
/// forward transform per call once the cache is warm, and bit-exact
/// agreement with negacyclic_mul_naive. Requires
/// (log2_q - 1) + log2(N) <= 52 so double precision is exact.
TorusPoly negacyclic_mul(const TorusPoly& x, const FourierKeyCache& key,
                         const DwtPlan& plan, const ParamSet& ps);

/// Relative root mean square error:
/// sqrt(mean |X_i - Y_i|^2) / sqrt(sum |X_i|^2).
double rrmse(std::span<const double> x, std::span<const double> y);

}  // namespace tsbc
