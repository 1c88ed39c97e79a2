// Linear-Gaussian state-space model: definition, exact covariances, sampling.
//
// Dynamics   x_k = A_k x_{k-1} + q_k,  q_k ~ N(0, Q_k),  k = 1..T
// Measurement y_k = C_k x_k + r_k,     r_k ~ N(0, R_k),  k = 0..T
// with x_0 ~ N(0, P0). By convention Q_0 refers to P0.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pkf/psd.hpp"
#include "pkf/rng.hpp"
#include "pkf/types.hpp"

namespace pkf {

struct ModelSpec {
    Index n_x = 0;
    Index n_y = 0;
    Index T = 0;  // final time index; sequences run k = 0..T

    // Size 1 means the matrix is constant in time; otherwise A and Q have T
    // entries (k = 1..T) and C and R have T+1 entries (k = 0..T).
    std::vector<Mat> A_seq;
    std::vector<Mat> C_seq;
    std::vector<Mat> Q_seq;
    std::vector<Mat> R_seq;
    Mat P0;
    Vec alpha;  // cost weights, length T+1

    bool time_invariant_A() const { return A_seq.size() == 1; }

    const Mat& A(Index k) const { return A_seq.size() == 1 ? A_seq[0] : A_seq.at(k - 1); }
    const Mat& C(Index k) const { return C_seq.size() == 1 ? C_seq[0] : C_seq.at(k); }
    const Mat& Q(Index k) const { return Q_seq.size() == 1 ? Q_seq[0] : Q_seq.at(k - 1); }
    const Mat& R(Index k) const { return R_seq.size() == 1 ? R_seq[0] : R_seq.at(k); }

    /// Q_k with the paper's Q_0 = P0 convention.
    const Mat& Qeff(Index k) const { return k == 0 ? P0 : Q(k); }

    void validate() const {
        require(n_x > 0 && n_y > 0 && T >= 0, "ModelSpec: n_x, n_y must be positive");
        require(!A_seq.empty() && !C_seq.empty() && !Q_seq.empty() && !R_seq.empty(),
                "ModelSpec: empty matrix sequence");
        require(A_seq.size() == 1 || static_cast<Index>(A_seq.size()) == T,
                "ModelSpec: A must have 1 or T entries");
        require(C_seq.size() == 1 || static_cast<Index>(C_seq.size()) == T + 1,
                "ModelSpec: C must have 1 or T+1 entries");
        require(Q_seq.size() == 1 || static_cast<Index>(Q_seq.size()) == T,
                "ModelSpec: Q must have 1 or T entries");
        require(R_seq.size() == 1 || static_cast<Index>(R_seq.size()) == T + 1,
                "ModelSpec: R must have 1 or T+1 entries");
        for (const Mat& a : A_seq) require(a.rows() == n_x && a.cols() == n_x, "ModelSpec: A dims");
        for (const Mat& c : C_seq) require(c.rows() == n_y && c.cols() == n_x, "ModelSpec: C dims");
        for (const Mat& q : Q_seq) {
            require(q.rows() == n_x && q.cols() == n_x, "ModelSpec: Q dims");
            check_psd(q, "ModelSpec: Q");
        }
        for (const Mat& r : R_seq) {
            require(r.rows() == n_y && r.cols() == n_y, "ModelSpec: R dims");
            check_psd(r, "ModelSpec: R");
        }
        require(P0.rows() == n_x && P0.cols() == n_x, "ModelSpec: P0 dims");
        check_psd(P0, "ModelSpec: P0");
        require(alpha.size() == T + 1, "ModelSpec: alpha must have T+1 entries");
        require(alpha.minCoeff() >= 0.0 && alpha.maxCoeff() > 0.0,
                "ModelSpec: alpha must be nonnegative with at least one positive entry");
    }
};

struct Trajectory {
    std::vector<Vec> states;        // x_0..x_T
    std::vector<Vec> measurements;  // y_0..y_T
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Noise transforms for one model, built once and reused across trajectories.
class TrajectorySampler {
public:
    explicit TrajectorySampler(const ModelSpec& model) : model_(&model) {
        model.validate();
        x0_ = GaussianSampler(model.P0);
        const bool q_const = model.Q_seq.size() == 1;
        const bool r_const = model.R_seq.size() == 1;
        q_.reserve(q_const ? 1 : model.T);
        for (const Mat& q : model.Q_seq) q_.emplace_back(q);
        r_.reserve(r_const ? 1 : model.T + 1);
        for (const Mat& r : model.R_seq) r_.emplace_back(r);
    }

    /// Deterministic given (seed, stream): stream conventionally indexes the
    /// trajectory within a Monte-Carlo batch.
    Trajectory sample(std::uint64_t seed, std::uint64_t stream = 0) const {
        const ModelSpec& m = *model_;
        Philox rng(seed, stream);
        Trajectory t;
        t.seed = seed;
        t.stream = stream;
        t.states.resize(m.T + 1);
        t.measurements.resize(m.T + 1);
        Vec x = x0_.sample(rng);
        t.states[0] = x;
        t.measurements[0] = m.C(0) * x + rsampler(0).sample(rng);
        for (Index k = 1; k <= m.T; ++k) {
            x = m.A(k) * x + qsampler(k).sample(rng);
            t.states[k] = x;
            t.measurements[k] = m.C(k) * x + rsampler(k).sample(rng);
        }
        return t;
    }

private:
    const GaussianSampler& qsampler(Index k) const { return q_.size() == 1 ? q_[0] : q_[k - 1]; }
    const GaussianSampler& rsampler(Index k) const { return r_.size() == 1 ? r_[0] : r_[k]; }

    const ModelSpec* model_;
    GaussianSampler x0_;
    std::vector<GaussianSampler> q_;
    std::vector<GaussianSampler> r_;
};

inline Trajectory sample_trajectory(const ModelSpec& model, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
    return TrajectorySampler(model).sample(seed, stream);
}

/// Exact covariance of x_k: Sigma_0 = P0, Sigma_k = A_k Sigma_{k-1} A_k^T + Q_k.
inline Mat state_covariance(const ModelSpec& model, Index k) {
    require(k >= 0 && k <= model.T, "state_covariance: k out of range");
    Mat sigma = model.P0;
    for (Index t = 1; t <= k; ++t)
        sigma = symmetrize(model.A(t) * sigma * model.A(t).transpose() + model.Q(t));
    return sigma;
}

/// All of Sigma_{x_0}..Sigma_{x_T} in one sweep.
inline std::vector<Mat> state_covariances(const ModelSpec& model) {
    std::vector<Mat> out(model.T + 1);
    out[0] = model.P0;
    for (Index t = 1; t <= model.T; ++t)
        out[t] = symmetrize(model.A(t) * out[t - 1] * model.A(t).transpose() + model.Q(t));
    return out;
}

/// Covariance of the stacked vector (x_{k-w+1}, ..., x_k), dimension w*n_x.
/// Cross blocks use Cov(x_i, x_j) = (A_i ... A_{j+1}) Sigma_j for i >= j.
inline Mat windowed_state_covariance(const ModelSpec& model, Index k, Index w) {
    require(w >= 1, "windowed_state_covariance: w must be >= 1");
    require(k >= w - 1 && k <= model.T, "windowed_state_covariance: k out of range");
    const Index n = model.n_x;
    const Index k0 = k - w + 1;
    std::vector<Mat> sigma(w);
    {
        Mat s = state_covariance(model, k0);
        sigma[0] = s;
        for (Index j = 1; j < w; ++j) {
            const Index t = k0 + j;
            s = symmetrize(model.A(t) * s * model.A(t).transpose() + model.Q(t));
            sigma[j] = s;
        }
    }
    Mat out = Mat::Zero(w * n, w * n);
    for (Index j = 0; j < w; ++j) {
        out.block(j * n, j * n, n, n) = sigma[j];
        Mat cross = sigma[j];  // becomes Cov(x_i, x_j) as i grows
        for (Index i = j + 1; i < w; ++i) {
            cross = model.A(k0 + i) * cross;
            out.block(i * n, j * n, n, n) = cross;
            out.block(j * n, i * n, n, n) = cross.transpose();
        }
    }
    return symmetrize(out);
}

}  // namespace pkf
