// Online runtimes for the demonstrated estimators: temporally-inconsistent
// per-step transport, the innovation-only perceptual filter, the recursive
// form with an unutilized-information state, and the stationary variant,
// plus the DARE / algebraic-Lyapunov machinery the stationary filter needs.
//
// Perceptual runtimes recompute innovations from the raw measurements via an
// embedded Kalman pass, so a FilterRun is self-contained given (Y, gains).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkf/gain.hpp"
#include "pkf/kalman.hpp"
#include "pkf/model.hpp"
#include "pkf/psd.hpp"
#include "pkf/rng.hpp"
#include "pkf/transport.hpp"
#include "pkf/types.hpp"

namespace pkf {

enum class ScheduleKind { PKF, Recursive, Stationary };

inline const char* to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::PKF: return "PKF";
        case ScheduleKind::Recursive: return "Recursive";
        case ScheduleKind::Stationary: return "Stationary";
    }
    return "?";
}

/// Filter coefficients plus the noise covariances that complete each update
/// to the process-noise law. For PKF schedules Phi is empty (identically 0);
/// Recursive schedules also carry the unutilized-information covariances and
/// the Psi matrices of their recursion. Stationary schedules hold one entry.
struct GainSchedule {
    ScheduleKind kind = ScheduleKind::PKF;
    std::vector<Mat> Pi;
    std::vector<Mat> Phi;
    std::vector<Mat> Sigma_w;
    std::vector<Mat> Sigma_Ups;
    std::vector<Mat> Psi;
    double objective = 0.0;   // achieved weighted cost sum_k alpha_k tr(D_k)
    bool converged = true;    // false when a numeric optimizer found no improvement

    const Mat& pi(Index k) const { return Pi.size() == 1 ? Pi[0] : Pi.at(k); }
    const Mat& phi(Index k) const { return Phi.size() == 1 ? Phi[0] : Phi.at(k); }
    const Mat& sigma_w(Index k) const { return Sigma_w.size() == 1 ? Sigma_w[0] : Sigma_w.at(k); }
};

/// Hard feasibility floor: Sigma_w eigenvalues below -kSigmaWTol * ||Q_k||
/// are treated as real violations, smaller ones as round-off.
inline constexpr double kSigmaWTol = 1e-6;

/// Check a schedule against the model/Kalman quantities it was built for.
/// Returns the offending step (>= 0) and a message, or -1 when valid.
inline Index validate_schedule(const ModelSpec& model, const KalmanGains& g,
                               const GainSchedule& s, std::string* why = nullptr) {
    auto fail = [&](Index k, const std::string& msg) {
        if (why) *why = msg;
        return k;
    };
    const Index steps = model.T + 1;
    if (s.kind != ScheduleKind::Stationary &&
        (static_cast<Index>(s.Pi.size()) != steps ||
         static_cast<Index>(s.Sigma_w.size()) != steps))
        return fail(0, "schedule length does not match the model horizon");
    if (s.kind == ScheduleKind::Recursive &&
        (static_cast<Index>(s.Phi.size()) != steps ||
         static_cast<Index>(s.Sigma_Ups.size()) != steps ||
         static_cast<Index>(s.Psi.size()) != steps))
        return fail(0, "recursive schedule is missing Phi/Sigma_Ups/Psi");

    if (s.kind == ScheduleKind::Stationary) return -1;

    Mat sig_ups = Mat::Zero(model.n_x, model.n_x);
    for (Index k = 0; k < steps; ++k) {
        const Mat& Q = model.Qeff(k);
        const double qn = std::max(Q.norm(), 1e-300);
        Mat sw = Q - s.Pi[k] * g.M[k] * s.Pi[k].transpose();
        if (s.kind == ScheduleKind::Recursive) {
            const Mat Ak = k == 0 ? Mat(Mat::Identity(model.n_x, model.n_x)) : model.A(k);
            const Mat G = Ak * sig_ups * Ak.transpose();
            sw -= s.Phi[k] * G * s.Phi[k].transpose();
            const Mat psi = g.M[k] * s.Pi[k].transpose() + G * s.Phi[k].transpose();
            if ((psi - s.Psi[k]).norm() > 1e-8 * (1.0 + psi.norm()))
                return fail(k, "stored Psi does not match its recursion at step " + std::to_string(k));
            if ((sig_ups - s.Sigma_Ups[k]).norm() > 1e-8 * (1.0 + sig_ups.norm()))
                return fail(k, "stored Sigma_Ups does not match its recursion at step " +
                                   std::to_string(k));
            sig_ups = clamp_psd(G + g.M[k] - psi * pinv_psd(Q) * psi.transpose());
        }
        if (min_eigenvalue(symmetrize(sw)) < -kSigmaWTol * qn)
            return fail(k, "Sigma_w is not PSD at step " + std::to_string(k));
        if ((clamp_psd(symmetrize(sw)) - s.Sigma_w[k]).norm() > 1e-6 * (1.0 + qn))
            return fail(k, "stored Sigma_w does not match the coefficients at step " +
                               std::to_string(k));
    }
    return -1;
}

struct FilterRun {
    std::vector<Vec> estimates;  // x_hat_0..x_hat_T
    std::vector<Vec> updates;    // realized J_k = x_hat_k - A_k x_hat_{k-1}
    std::vector<Vec> ups;        // realized unutilized information (Recursive only)
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

/// Innovation recursion shared by the perceptual runtimes. Steps the Kalman
/// state alongside the perceptual one and hands the innovation to `update`.
template <typename F>
void innovation_loop(const ModelSpec& model, const KalmanGains& g, const std::vector<Vec>& Y,
                     F&& update) {
    require(static_cast<Index>(Y.size()) == model.T + 1, "filter run: Y must have T+1 entries");
    Vec xs = Vec::Zero(model.n_x);
    for (Index k = 0; k <= model.T; ++k) {
        const Vec prior = (k == 0) ? Vec(Vec::Zero(model.n_x)) : Vec(model.A(k) * xs);
        const Vec innov = Y[k] - model.C(k) * prior;
        xs = prior + g.K[k] * innov;
        update(k, innov);
    }
}

}  // namespace detail

/// Runtime for PKF and Recursive schedules; precomputes noise samplers and
/// pseudoinverses once so Monte-Carlo batches only pay for the recursions.
class PerceptualRunner {
public:
    PerceptualRunner(const ModelSpec& model, const KalmanGains& gains, GainSchedule schedule)
        : model_(&model), gains_(&gains), sched_(std::move(schedule)) {
        std::string why;
        const Index bad = validate_schedule(model, gains, sched_, &why);
        if (bad >= 0) throw NotPSD("PerceptualRunner: " + why);
        w_.reserve(sched_.Sigma_w.size());
        for (const Mat& sw : sched_.Sigma_w) w_.emplace_back(clamp_psd(sw));
        if (sched_.kind == ScheduleKind::Recursive) {
            q_pinv_.resize(model.T + 1);
            for (Index k = 0; k <= model.T; ++k) q_pinv_[k] = pinv_psd(model.Qeff(k));
        }
    }

    const GainSchedule& schedule() const { return sched_; }

    FilterRun run(const std::vector<Vec>& Y, std::uint64_t seed, std::uint64_t stream = 0) const {
        const ModelSpec& m = *model_;
        FilterRun out;
        out.seed = seed;
        out.stream = stream;
        out.estimates.resize(m.T + 1);
        out.updates.resize(m.T + 1);
        const bool recursive = sched_.kind == ScheduleKind::Recursive;
        if (recursive) out.ups.resize(m.T + 1);

        Philox rng(seed, stream);
        Vec xhat = Vec::Zero(m.n_x);
        Vec ups = Vec::Zero(m.n_x);
        detail::innovation_loop(m, *gains_, Y, [&](Index k, const Vec& innov) {
            const Mat Ak = k == 0 ? Mat(Mat::Identity(m.n_x, m.n_x)) : m.A(k);
            Vec J = sched_.pi(k) * (gains_->K[k] * innov) + w_[k].sample(rng);
            if (recursive) {
                const Vec a_ups = Ak * ups;
                out.ups[k] = ups;
                J += sched_.phi(k) * a_ups;
                ups = a_ups + gains_->K[k] * innov - sched_.Psi[k] * (q_pinv_[k] * J);
            }
            xhat = (k == 0) ? J : Vec(Ak * xhat + J);
            out.updates[k] = J;
            out.estimates[k] = xhat;
        });
        return out;
    }

private:
    const ModelSpec* model_;
    const KalmanGains* gains_;
    GainSchedule sched_;
    std::vector<GaussianSampler> w_;
    std::vector<Mat> q_pinv_;
};

inline FilterRun run_pkf(const ModelSpec& model, const KalmanGains& gains,
                         const std::vector<Vec>& Y, const GainSchedule& schedule,
                         std::uint64_t seed, std::uint64_t stream = 0) {
    require(schedule.kind == ScheduleKind::PKF, "run_pkf: schedule kind must be PKF");
    return PerceptualRunner(model, gains, schedule).run(Y, seed, stream);
}

inline FilterRun run_recursive_filter(const ModelSpec& model, const KalmanGains& gains,
                                      const std::vector<Vec>& Y, const GainSchedule& schedule,
                                      std::uint64_t seed, std::uint64_t stream = 0) {
    require(schedule.kind == ScheduleKind::Recursive,
            "run_recursive_filter: schedule kind must be Recursive");
    return PerceptualRunner(model, gains, schedule).run(Y, seed, stream);
}

/// Per-step transport maps of the temporally-inconsistent filter, built once
/// per model from the analytic marginals Sigma_{x_k} and
/// Sigma_{x*_k} = Sigma_{x_k} - P_{k|k}.
class TicRunner {
public:
    TicRunner(const ModelSpec& model, const KalmanGains& gains) : model_(&model) {
        const std::vector<Mat> sx = state_covariances(model);
        maps_.resize(model.T + 1);
        w_.resize(model.T + 1);
        for (Index k = 0; k <= model.T; ++k) {
            maps_[k] = transport_map(sx[k], clamp_psd(sx[k] - gains.P_post[k]));
            w_[k] = GaussianSampler(maps_[k].Sigma_w);
        }
    }

    const TransportMap& map(Index k) const { return maps_.at(k); }

    FilterRun run(const KalmanRun& krun, std::uint64_t seed, std::uint64_t stream = 0) const {
        const ModelSpec& m = *model_;
        require(static_cast<Index>(krun.x_star.size()) == m.T + 1, "TicRunner: run length");
        Philox rng(seed, stream);
        FilterRun out;
        out.seed = seed;
        out.stream = stream;
        out.estimates.resize(m.T + 1);
        out.updates.resize(m.T + 1);
        for (Index k = 0; k <= m.T; ++k) {
            out.estimates[k] = maps_[k].T_star * krun.x_star[k] + w_[k].sample(rng);
            out.updates[k] = (k == 0) ? out.estimates[k]
                                      : Vec(out.estimates[k] - m.A(k) * out.estimates[k - 1]);
        }
        return out;
    }

private:
    const ModelSpec* model_;
    std::vector<TransportMap> maps_;
    std::vector<GaussianSampler> w_;
};

inline FilterRun run_tic_filter(const ModelSpec& model, const KalmanGains& gains,
                                const KalmanRun& krun, std::uint64_t seed,
                                std::uint64_t stream = 0) {
    return TicRunner(model, gains).run(krun, seed, stream);
}

/// Closed-form per-step MSE of the temporally-inconsistent filter:
///   d*_k + tr(Sigma_x + Sigma_x* - 2 (Sigma_x^{1/2} Sigma_x* Sigma_x^{1/2})^{1/2}).
inline std::vector<double> tic_mse_closed_form(const ModelSpec& model, const KalmanGains& gains) {
    const std::vector<Mat> sx = state_covariances(model);
    std::vector<double> out(model.T + 1);
    for (Index k = 0; k <= model.T; ++k) {
        const Mat sxs = clamp_psd(sx[k] - gains.P_post[k]);
        const Mat s1 = sqrt_psd(sx[k]);
        const Mat cross = sqrt_psd(symmetrize(s1 * sxs * s1));
        out[k] = gains.dstar(k) + sx[k].trace() + sxs.trace() - 2.0 * cross.trace();
    }
    return out;
}

struct DareOptions {
    double tol = 1e-10;       // relative fixed-point residual
    long max_iters = 1000000;
};

/// Fixed-point iteration for P = A P A^T - A P C^T (C P C^T + R)^-1 C P A^T + Q
/// started from P = Q. P is the steady-state prior covariance.
inline Mat dare_solve(const Mat& A, const Mat& C, const Mat& Q, const Mat& R,
                      const DareOptions& opts = {}) {
    check_square(A, "dare_solve: A");
    require(C.cols() == A.rows(), "dare_solve: C dims");
    Mat P = Q;
    for (long it = 0; it < opts.max_iters; ++it) {
        const Mat S = symmetrize(C * P * C.transpose() + R);
        const Mat APC = A * P * C.transpose();
        const Mat next = symmetrize(A * P * A.transpose() - APC * pinv_psd(S) * APC.transpose() + Q);
        const double diff = (next - P).norm();
        const double scale = std::max(next.norm(), 1e-300);
        P = next;
        if (diff <= opts.tol * scale) return P;
    }
    throw NoConvergence("dare_solve: no fixed point within iteration cap");
}

/// Discrete Lyapunov equation X = A X A^T + N by accumulation; requires a
/// stable A (checked by the caller via the spectral radius).
inline Mat lyapunov_fixed_point(const Mat& A, const Mat& N, double tol = 1e-13,
                                long max_iters = 2000000) {
    Mat X = N;
    for (long it = 0; it < max_iters; ++it) {
        const Mat next = symmetrize(A * X * A.transpose() + N);
        const double diff = (next - X).norm();
        const double scale = std::max(next.norm(), 1e-300);
        X = next;
        if (diff <= tol * scale) return X;
    }
    throw NoConvergence("lyapunov_fixed_point: no convergence within iteration cap");
}

inline double spectral_radius(const Mat& A) {
    Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Steady-state quantities of the stationary perceptual filter.
struct StationarySolution {
    Mat P;        // DARE solution (steady-state prior covariance)
    Mat P_post;   // (I - K C) P
    Mat K, S, M;  // steady-state Kalman gain, innovation covariance, K S K^T
    Mat B;        // sum_k (A^k)^T A^k
    Mat Pi;       // stationary perceptual gain
    Mat Sigma_w;  // Q - Pi M Pi^T, clamped
    Mat D;        // algebraic Lyapunov solution D = A D A^T + Q + M - Pi M - M Pi^T
    bool image_ok = true;

    /// Steady-state MSE of the stationary perceptual filter.
    double plateau_mse() const { return P_post.trace() + D.trace(); }
};

inline StationarySolution stationary_pkf(const ModelSpec& model, const DareOptions& opts = {}) {
    require(model.A_seq.size() == 1 && model.C_seq.size() == 1 && model.Q_seq.size() == 1 &&
                model.R_seq.size() == 1,
            "stationary_pkf: model must be time-invariant");
    const Mat& A = model.A_seq[0];
    const Mat& C = model.C_seq[0];
    const Mat& Q = model.Q_seq[0];
    const Mat& R = model.R_seq[0];
    const double rho = spectral_radius(A);
    if (rho >= 1.0 - 1e-9)
        throw UnstableA("stationary_pkf: spectral radius " + std::to_string(rho));

    StationarySolution sol;
    sol.P = dare_solve(A, C, Q, R, opts);
    sol.S = symmetrize(C * sol.P * C.transpose() + R);
    sol.K = sol.P * C.transpose() * pinv_psd(sol.S);
    sol.M = symmetrize(sol.K * sol.S * sol.K.transpose());
    sol.P_post = clamp_psd(sol.P - sol.K * C * sol.P);

    // B <- I + A^T B A accumulates sum (A^k)^T A^k.
    {
        const Mat I = Mat::Identity(model.n_x, model.n_x);
        Mat B = I;
        for (long it = 0; it < opts.max_iters; ++it) {
            const Mat next = symmetrize(I + A.transpose() * B * A);
            const double diff = (next - B).norm();
            B = next;
            if (diff <= 1e-10 * B.norm()) break;
            if (it + 1 == opts.max_iters)
                throw NoConvergence("stationary_pkf: B series did not converge");
        }
        sol.B = B;
    }

    sol.Pi = pkf_gain(Q, sol.M, sol.B, &sol.image_ok);
    sol.Sigma_w = clamp_psd(Q - sol.Pi * sol.M * sol.Pi.transpose());
    const Mat N = symmetrize(Q + sol.M - sol.Pi * sol.M - sol.M * sol.Pi.transpose());
    sol.D = lyapunov_fixed_point(A, N);
    return sol;
}

/// Truncated series sum_{k=0}^{terms-1} A^k N (A^k)^T with
/// N = Q + M - Pi M - M Pi^T, used as an independent route to D.
inline Mat stationary_deviation_series(const Mat& A, const Mat& Q, const Mat& M, const Mat& Pi,
                                       long terms) {
    const Mat N = symmetrize(Q + M - Pi * M - M * Pi.transpose());
    Mat D = Mat::Zero(A.rows(), A.cols());
    Mat Ak = Mat::Identity(A.rows(), A.cols());
    for (long k = 0; k < terms; ++k) {
        D += Ak * N * Ak.transpose();
        Ak = A * Ak;
    }
    return symmetrize(D);
}

/// Runtime for the stationary filter: fixed Kalman gain K and fixed
/// perceptual gain Pi at every step, including the start-up transient.
inline FilterRun run_stationary_pkf(const ModelSpec& model, const StationarySolution& sol,
                                    const std::vector<Vec>& Y, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
    require(static_cast<Index>(Y.size()) == model.T + 1, "run_stationary_pkf: Y length");
    const Mat& A = model.A_seq[0];
    const Mat& C = model.C_seq[0];
    const GaussianSampler wsamp(sol.Sigma_w);
    Philox rng(seed, stream);
    FilterRun out;
    out.seed = seed;
    out.stream = stream;
    out.estimates.resize(model.T + 1);
    out.updates.resize(model.T + 1);
    Vec xs = Vec::Zero(model.n_x);
    Vec xhat = Vec::Zero(model.n_x);
    for (Index k = 0; k <= model.T; ++k) {
        const Vec prior = (k == 0) ? Vec(Vec::Zero(model.n_x)) : Vec(A * xs);
        const Vec innov = Y[k] - C * prior;
        xs = prior + sol.K * innov;
        const Vec J = sol.Pi * (sol.K * innov) + wsamp.sample(rng);
        xhat = (k == 0) ? J : Vec(A * xhat + J);
        out.updates[k] = J;
        out.estimates[k] = xhat;
    }
    return out;
}

}  // namespace pkf
