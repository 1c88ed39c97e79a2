// Counter-based random number generation.
//
// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3")
// keyed by a 64-bit seed and a 64-bit stream id. Gaussian variates come from
// Box-Muller on the raw 64-bit outputs, so a (seed, stream) pair reproduces a
// trajectory exactly, independent of thread scheduling. Streams with distinct
// ids are independent for any practical purpose.
#pragma once

#include <cmath>
#include <cstdint>

#include "pkf/psd.hpp"
#include "pkf/types.hpp"

namespace pkf {

class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          ctr2_(static_cast<std::uint32_t>(stream)),
          ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint64_t next_u64() {
        if (have_ >= 2) {
            have_ = 0;
            block();
        }
        const std::uint64_t lo = out_[2 * have_];
        const std::uint64_t hi = out_[2 * have_ + 1];
        ++have_;
        return lo | (hi << 32);
    }

    /// Uniform in (0, 1].
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u = next_uniform();
        const double v = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 2.0 * M_PI * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Vec next_gaussian_vec(Index n) {
        Vec z(n);
        for (Index i = 0; i < n; ++i) z[i] = next_gaussian();
        return z;
    }

private:
    void block() {
        std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = ctr2_, c3 = ctr3_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * c0;
            const std::uint64_t p1 = 0xCD9E8D57ull * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
        if (++ctr0_ == 0) ++ctr1_;  // 64-bit in-stream counter
    }

    std::uint32_t key0_, key1_;
    std::uint32_t ctr0_ = 0, ctr1_ = 0;  // advances within the stream
    std::uint32_t ctr2_, ctr3_;          // stream id
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int have_ = 2;  // force block() on first use
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Samples N(0, Sigma) through an eigenvalue square root, so exactly singular
/// covariances (including Sigma = 0) are handled without regularization.
class GaussianSampler {
public:
    GaussianSampler() = default;
    explicit GaussianSampler(const Mat& sigma) {
        SymEig e = sym_eig(sigma);
        const double scale = e.values.cwiseAbs().maxCoeff();
        if (e.values.minCoeff() < -kPsdTol * (scale > 0 ? scale : 1.0))
            throw NotPSD("GaussianSampler: covariance is not PSD");
        transform_ = e.vectors * e.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
        dim_ = sigma.rows();
    }

    Index dim() const { return dim_; }

    Vec sample(Philox& rng) const { return transform_ * rng.next_gaussian_vec(dim_); }

private:
    Mat transform_;
    Index dim_ = 0;
};

}  // namespace pkf
