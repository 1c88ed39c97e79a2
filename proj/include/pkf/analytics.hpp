// Analytic MSE recursions (the D_k families), empirical error curves with
// Monte-Carlo error bars, and Gaussian quality curves (marginal and windowed
// Gelbrich distances against analytic ground-truth moments).
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pkf/filters.hpp"
#include "pkf/kalman.hpp"
#include "pkf/model.hpp"
#include "pkf/transport.hpp"
#include "pkf/types.hpp"

namespace pkf {

/// D_k = A_k D_{k-1} A_k^T + Q_k + M_k - Pi_k M_k - M_k Pi_k^T,
/// with D_{-1} = 0 and the Q_0 = P0, M_0 = Cov(x*_0) conventions.
inline std::vector<Mat> dk_pkf(const ModelSpec& model, const KalmanGains& g,
                               const GainSchedule& s) {
    std::vector<Mat> out(model.T + 1);
    Mat D = Mat::Zero(model.n_x, model.n_x);
    for (Index k = 0; k <= model.T; ++k) {
        if (k > 0) D = model.A(k) * D * model.A(k).transpose();
        const Mat& M = g.M[k];
        const Mat PiM = s.pi(k) * M;
        D = symmetrize(D + model.Qeff(k) + M - PiM - PiM.transpose());
        out[k] = D;
    }
    return out;
}

/// Recursive-form variant with the unutilized-information correction:
/// subtracts A Sig_Ups A^T Phi^T + Phi A Sig_Ups A^T using the schedule's
/// stored covariances.
inline std::vector<Mat> dk_recursive(const ModelSpec& model, const KalmanGains& g,
                                     const GainSchedule& s) {
    require(s.kind == ScheduleKind::Recursive, "dk_recursive: schedule kind");
    std::vector<Mat> out(model.T + 1);
    Mat D = Mat::Zero(model.n_x, model.n_x);
    for (Index k = 0; k <= model.T; ++k) {
        const Mat Ak = k == 0 ? Mat(Mat::Identity(model.n_x, model.n_x)) : model.A(k);
        const Mat& M = g.M[k];
        const Mat PiM = s.Pi[k] * M;
        const Mat G = Ak * s.Sigma_Ups[k] * Ak.transpose();
        const Mat GPhi = G * s.Phi[k].transpose();
        D = symmetrize(Ak * D * Ak.transpose() + model.Qeff(k) + M - PiM - PiM.transpose() -
                       GPhi - GPhi.transpose());
        out[k] = D;
    }
    return out;
}

/// Per-step quality curves for one filter on one Monte-Carlo batch.
struct QualityReport {
    std::string filter;
    Index n_trajectories = 0;
    Index window = 16;
    std::uint64_t seed = 0;
    std::vector<double> analytic_mse;      // NaN where no analytic curve applies
    std::vector<double> empirical_mse;
    std::vector<double> mc_stderr;
    std::vector<double> marginal_gelbrich;
    std::vector<double> windowed_gelbrich;  // NaN off the evaluation grid / k < w-1
};

/// Mean squared error ||est - truth||^2 per step with its Monte-Carlo
/// standard error.
inline void empirical_mse_curves(const std::vector<FilterRun>& runs,
                                 const std::vector<Trajectory>& truths,
                                 std::vector<double>& mse, std::vector<double>& stderr_out) {
    require(!runs.empty() && runs.size() == truths.size(),
            "empirical_mse_curves: batches must be aligned and nonempty");
    const Index T1 = static_cast<Index>(runs.front().estimates.size());
    const double n = static_cast<double>(runs.size());
    mse.assign(T1, 0.0);
    stderr_out.assign(T1, 0.0);
    std::vector<double> sumsq(T1, 0.0);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        require(static_cast<Index>(runs[i].estimates.size()) == T1 &&
                    static_cast<Index>(truths[i].states.size()) == T1,
                "empirical_mse_curves: run length mismatch");
        for (Index k = 0; k < T1; ++k) {
            const double e = (runs[i].estimates[k] - truths[i].states[k]).squaredNorm();
            mse[k] += e;
            sumsq[k] += e * e;
        }
    }
    for (Index k = 0; k < T1; ++k) {
        mse[k] /= n;
        const double var = std::max(0.0, sumsq[k] / n - mse[k] * mse[k]);
        stderr_out[k] = std::sqrt(var / n);
    }
}

struct CurveOptions {
    Index window = 16;
    Index window_stride = 1;  // evaluate the windowed distance every stride-th step
    bool marginal = true;
};

/// Full quality report: empirical MSE plus Gelbrich distances of the fitted
/// output Gaussians against the analytic ground-truth moments.
inline QualityReport empirical_curves(const ModelSpec& model, const std::vector<FilterRun>& runs,
                                      const std::vector<Trajectory>& truths,
                                      const CurveOptions& opts = {}) {
    QualityReport rep;
    rep.n_trajectories = static_cast<Index>(runs.size());
    rep.window = opts.window;
    empirical_mse_curves(runs, truths, rep.empirical_mse, rep.mc_stderr);
    const Index T1 = model.T + 1;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.analytic_mse.assign(T1, nan);
    rep.marginal_gelbrich.assign(T1, nan);
    rep.windowed_gelbrich.assign(T1, nan);

    const std::vector<Mat> sx = state_covariances(model);
    std::vector<Vec> buf(runs.size());
    if (opts.marginal) {
        for (Index k = 0; k < T1; ++k) {
            for (std::size_t i = 0; i < runs.size(); ++i) buf[i] = runs[i].estimates[k];
            const auto [mu, cov] = fit_gaussian(buf);
            rep.marginal_gelbrich[k] = gelbrich_distance(mu, cov, Vec::Zero(model.n_x), sx[k]);
        }
    }
    const Index w = opts.window;
    if (w >= 1) {
        std::vector<Vec> stacked(runs.size(), Vec(w * model.n_x));
        for (Index k = w - 1; k < T1; k += opts.window_stride) {
            for (std::size_t i = 0; i < runs.size(); ++i) {
                for (Index j = 0; j < w; ++j)
                    stacked[i].segment(j * model.n_x, model.n_x) =
                        runs[i].estimates[k - w + 1 + j];
            }
            const auto [mu, cov] = fit_gaussian(stacked);
            rep.windowed_gelbrich[k] = gelbrich_distance(
                mu, cov, Vec::Zero(w * model.n_x), windowed_state_covariance(model, k, w));
        }
    }
    return rep;
}

/// Sampling floor for the quality curves: the same Gelbrich statistic
/// computed between two equal-size, independent ground-truth batches.
inline double truth_floor_marginal(const std::vector<Trajectory>& a,
                                   const std::vector<Trajectory>& b, Index k) {
    std::vector<Vec> sa(a.size()), sb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) sa[i] = a[i].states[k];
    for (std::size_t i = 0; i < b.size(); ++i) sb[i] = b[i].states[k];
    const auto [ma, ca] = fit_gaussian(sa);
    const auto [mb, cb] = fit_gaussian(sb);
    return gelbrich_distance(ma, ca, mb, cb);
}

inline Vec stack_window(const std::vector<Vec>& states, Index k, Index w) {
    const Index n = states.front().size();
    Vec out(w * n);
    for (Index j = 0; j < w; ++j) out.segment(j * n, n) = states[k - w + 1 + j];
    return out;
}

inline double truth_floor_windowed(const std::vector<Trajectory>& a,
                                   const std::vector<Trajectory>& b, Index k, Index w) {
    std::vector<Vec> sa(a.size()), sb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) sa[i] = stack_window(a[i].states, k, w);
    for (std::size_t i = 0; i < b.size(); ++i) sb[i] = stack_window(b[i].states, k, w);
    const auto [ma, ca] = fit_gaussian(sa);
    const auto [mb, cb] = fit_gaussian(sb);
    return gelbrich_distance(ma, ca, mb, cb);
}

/// Streaming per-step accumulator of a scalar statistic (mean and standard
/// error) across trajectories; merge() combines shards from worker threads.
struct RunningMoments {
    std::vector<double> sum, sumsq;
    long count = 0;

    explicit RunningMoments(Index steps = 0) : sum(steps, 0.0), sumsq(steps, 0.0) {}

    void add(Index k, double v) {
        sum[k] += v;
        sumsq[k] += v * v;
    }
    void bump() { ++count; }

    void merge(const RunningMoments& o) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += o.sum[i];
            sumsq[i] += o.sumsq[i];
        }
        count += o.count;
    }

    double mean(Index k) const { return sum[k] / count; }
    double stderr_of_mean(Index k) const {
        const double m = mean(k);
        const double var = std::max(0.0, sumsq[k] / count - m * m);
        return std::sqrt(var / count);
    }
};

}  // namespace pkf
