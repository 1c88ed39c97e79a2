// Offline computation of gain schedules.
//
//  - solve_pkf: the closed-form innovation-only schedule, one extremal
//    problem per step.
//  - optimize_recursive: gradient descent over the recursive-form
//    coefficients {Pi_k, Phi_k} with analytic adjoint gradients and
//    feasibility kept by radial re-scaling of each step's coefficient pair.
//  - direct_oracle: the full linear-filter optimum at desk scale, solved as
//    a log-barrier ascent over an operator-norm ball after whitening both
//    the update and innovation coordinates.
//  - per_step_search: randomized lower bound for a single extremal problem.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pkf/analytics.hpp"
#include "pkf/filters.hpp"
#include "pkf/gain.hpp"
#include "pkf/kalman.hpp"
#include "pkf/model.hpp"
#include "pkf/rng.hpp"
#include "pkf/types.hpp"

namespace pkf {

enum class CostKind { TotalCost, TerminalCost, Weighted };

struct ObjectiveSpec {
    CostKind kind = CostKind::TotalCost;

    /// Weight sequence: all-ones, terminal indicator, or the model's alpha.
    Vec weights(const ModelSpec& model) const {
        switch (kind) {
            case CostKind::TotalCost: return Vec::Ones(model.T + 1);
            case CostKind::TerminalCost: {
                Vec a = Vec::Zero(model.T + 1);
                a[model.T] = 1.0;
                return a;
            }
            case CostKind::Weighted: return model.alpha;
        }
        return model.alpha;
    }

    static ObjectiveSpec total() { return {CostKind::TotalCost}; }
    static ObjectiveSpec terminal() { return {CostKind::TerminalCost}; }
    static ObjectiveSpec weighted() { return {CostKind::Weighted}; }
};

struct OptimizerOptions {
    long max_iters = 6000;
    double step_size = 2e-3;        // Adam learning rate
    double shrink_tolerance = 1e-12;  // bisection precision of the feasibility scaling
    double convergence_tol = 1e-10;   // relative objective stall threshold
    int restarts = 8;
    std::uint64_t seed = 0;

    // direct_oracle controls
    int barrier_outer = 30;
    long barrier_inner = 400;
};

/// Closed-form PKF schedule: Pi_k = pkf_gain(Qeff_k, M_k, B_k) per step.
/// The per-step problems are independent, so this is exact for the weighted
/// cost regardless of the weights. Requires a time-invariant A.
inline GainSchedule solve_pkf(const ModelSpec& model, const KalmanGains& g,
                              const ObjectiveSpec& objective) {
    require(model.time_invariant_A(), "solve_pkf: closed form needs a time-invariant A");
    const Vec alpha = objective.weights(model);
    const WeightSchedule w = weight_matrices(model.A_seq[0], alpha, model.T);
    GainSchedule s;
    s.kind = ScheduleKind::PKF;
    s.Pi.resize(model.T + 1);
    s.Sigma_w.resize(model.T + 1);
    for (Index k = 0; k <= model.T; ++k) {
        s.Pi[k] = pkf_gain(model.Qeff(k), g.M[k], w.B[k]);
        s.Sigma_w[k] = clamp_psd(model.Qeff(k) - s.Pi[k] * g.M[k] * s.Pi[k].transpose());
    }
    const std::vector<Mat> dks = dk_pkf(model, g, s);
    s.objective = 0.0;
    for (Index k = 0; k <= model.T; ++k) s.objective += alpha[k] * dks[k].trace();
    return s;
}

namespace detail {

/// Forward/adjoint engine for the recursive-form cost
///   F = sum_k alpha_k tr(D_k)
/// driven by the coupled recursions of D_k, Sigma_Ups_k and Psi_k.
struct RecursiveEngine {
    const ModelSpec* model;
    const KalmanGains* gains;
    Vec alpha;
    std::vector<Mat> q_pinv;   // Qeff_k^dagger
    std::vector<Mat> weightW;  // adjoint of D_k; equals B_k for constant A

    RecursiveEngine(const ModelSpec& m, const KalmanGains& g, const Vec& a)
        : model(&m), gains(&g), alpha(a) {
        q_pinv.resize(m.T + 1);
        for (Index k = 0; k <= m.T; ++k) q_pinv[k] = pinv_psd(m.Qeff(k));
        weightW.resize(m.T + 1);
        Mat W = Mat::Zero(m.n_x, m.n_x);
        const Mat I = Mat::Identity(m.n_x, m.n_x);
        for (Index k = m.T; k >= 0; --k) {
            const Mat& An = m.A(std::min(k + 1, m.T));  // A_{k+1}; unused when k = T
            W = (k == m.T) ? Mat(alpha[k] * I)
                           : Mat(alpha[k] * I + An.transpose() * W * An);
            weightW[k] = symmetrize(W);
        }
    }

    Mat Ak(Index k) const {
        return k == 0 ? Mat(Mat::Identity(model->n_x, model->n_x)) : model->A(k);
    }

    struct Cache {
        std::vector<Mat> Sig;  // Sigma_Ups_k
        std::vector<Mat> Psi;
        std::vector<Mat> G;    // A_k Sigma_Ups_k A_k^T
        std::vector<Mat> D;
        double objective = 0.0;
    };

    Cache forward(const std::vector<Mat>& Pi, const std::vector<Mat>& Phi) const {
        const ModelSpec& m = *model;
        Cache c;
        const Index n = m.T + 1;
        c.Sig.resize(n); c.Psi.resize(n); c.G.resize(n); c.D.resize(n);
        Mat Sig = Mat::Zero(m.n_x, m.n_x);
        Mat D = Mat::Zero(m.n_x, m.n_x);
        for (Index k = 0; k < n; ++k) {
            const Mat A = Ak(k);
            const Mat& M = gains->M[k];
            const Mat G = symmetrize(A * Sig * A.transpose());
            const Mat Psi = M * Pi[k].transpose() + G * Phi[k].transpose();
            const Mat PiM = Pi[k] * M;
            const Mat PhiG = Phi[k] * G;
            D = symmetrize(A * D * A.transpose() + m.Qeff(k) + M - PiM - PiM.transpose() -
                           PhiG - PhiG.transpose());
            c.objective += alpha[k] * D.trace();
            c.Sig[k] = Sig; c.Psi[k] = Psi; c.G[k] = G; c.D[k] = D;
            Sig = symmetrize(G + M - Psi * q_pinv[k] * Psi.transpose());
        }
        return c;
    }

    /// Adjoint gradients of F w.r.t. every Pi_k and Phi_k.
    void gradients(const std::vector<Mat>& Pi, const std::vector<Mat>& Phi, const Cache& c,
                   std::vector<Mat>& gPi, std::vector<Mat>& gPhi) const {
        const ModelSpec& m = *model;
        const Index n = m.T + 1;
        gPi.assign(n, Mat());
        gPhi.assign(n, Mat());
        Mat V = Mat::Zero(m.n_x, m.n_x);  // adjoint of Sigma_Ups_{k+1}
        for (Index k = n - 1; k >= 0; --k) {
            const Mat& W = weightW[k];
            const Mat& M = gains->M[k];
            const Mat& G = c.G[k];
            const Mat& Psi = c.Psi[k];
            const Mat Et = -2.0 * (q_pinv[k] * Psi.transpose() * V);  // E^T, E = dF/dPsi
            gPi[k] = -2.0 * W * M + Et * M;
            gPhi[k] = -2.0 * W * G + Et * G;
            const Mat WPhi = W * Phi[k];
            const Mat H = V - WPhi - WPhi.transpose() + Et.transpose() * Phi[k];
            const Mat A = Ak(k);
            V = symmetrize(A.transpose() * H * A);
        }
    }

    /// Largest c in (0,1] with Qeff_k - c^2 (Phi G Phi^T + Pi M Pi^T) >= 0,
    /// by bisection. G is the already-projected prefix's value.
    double feasibility_scale(Index k, const Mat& G, const Mat& Pi, const Mat& Phi,
                             double precision) const {
        const Mat& Q = model->Qeff(k);
        const Mat load = symmetrize(Phi * G * Phi.transpose() +
                                    Pi * gains->M[k] * Pi.transpose());
        const double qn = std::max(Q.norm(), 1e-300);
        auto ok = [&](double cc) {
            return min_eigenvalue(Q - cc * cc * load) >= -1e-14 * qn;
        };
        if (ok(1.0)) return 1.0;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > precision) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    /// In-place radial scaling pass making every step's Sigma_w PSD.
    void project(std::vector<Mat>& Pi, std::vector<Mat>& Phi, double precision) const {
        const ModelSpec& m = *model;
        Mat Sig = Mat::Zero(m.n_x, m.n_x);
        for (Index k = 0; k <= m.T; ++k) {
            const Mat A = Ak(k);
            const Mat& M = gains->M[k];
            const Mat G = symmetrize(A * Sig * A.transpose());
            const double cc = feasibility_scale(k, G, Pi[k], Phi[k], precision);
            if (cc < 1.0) {
                Pi[k] *= cc;
                Phi[k] *= cc;
            }
            const Mat Psi = M * Pi[k].transpose() + G * Phi[k].transpose();
            Sig = clamp_psd(G + M - Psi * q_pinv[k] * Psi.transpose());
        }
    }

    /// Package coefficients as a validated Recursive schedule.
    GainSchedule make_schedule(const std::vector<Mat>& Pi, const std::vector<Mat>& Phi) const {
        const ModelSpec& m = *model;
        GainSchedule s;
        s.kind = ScheduleKind::Recursive;
        s.Pi = Pi;
        s.Phi = Phi;
        const Index n = m.T + 1;
        s.Sigma_w.resize(n);
        s.Sigma_Ups.resize(n);
        s.Psi.resize(n);
        Mat Sig = Mat::Zero(m.n_x, m.n_x);
        for (Index k = 0; k < n; ++k) {
            const Mat A = Ak(k);
            const Mat& M = gains->M[k];
            const Mat G = symmetrize(A * Sig * A.transpose());
            const Mat Psi = M * Pi[k].transpose() + G * Phi[k].transpose();
            s.Sigma_Ups[k] = Sig;
            s.Psi[k] = Psi;
            s.Sigma_w[k] = clamp_psd(m.Qeff(k) - Phi[k] * G * Phi[k].transpose() -
                                     Pi[k] * M * Pi[k].transpose());
            Sig = clamp_psd(G + M - Psi * q_pinv[k] * Psi.transpose());
        }
        const Cache c = forward(Pi, Phi);
        s.objective = c.objective;
        return s;
    }
};

}  // namespace detail

/// Numeric optimization of the recursive-form coefficients. Warm-started at
/// the PKF schedule (Phi = 0) plus perturbed restarts; every iterate is made
/// feasible by radial scaling, and the best feasible iterate wins, so the
/// result never exceeds the PKF objective. `converged` is false when no
/// restart improved on the warm start.
inline GainSchedule optimize_recursive(const ModelSpec& model, const KalmanGains& g,
                                       const ObjectiveSpec& objective,
                                       const OptimizerOptions& opts = {}) {
    const Vec alpha = objective.weights(model);
    detail::RecursiveEngine eng(model, g, alpha);
    const Index n = model.T + 1;

    GainSchedule pkf = solve_pkf(model, g, objective);
    std::vector<Mat> bestPi = pkf.Pi;
    std::vector<Mat> bestPhi(n, Mat::Zero(model.n_x, model.n_x));
    double bestObj = eng.forward(bestPi, bestPhi).objective;
    const double warmObj = bestObj;

    for (int r = 0; r < opts.restarts; ++r) {
        Philox rng(opts.seed, 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(r));
        std::vector<Mat> Pi = pkf.Pi;
        std::vector<Mat> Phi(n, Mat::Zero(model.n_x, model.n_x));
        if (r > 0) {
            const double eta = 0.05 + 0.1 * static_cast<double>(r) / opts.restarts;
            for (Index k = 0; k < n; ++k) {
                for (Index i = 0; i < model.n_x; ++i)
                    for (Index j = 0; j < model.n_x; ++j) {
                        Pi[k](i, j) += eta * rng.next_gaussian();
                        Phi[k](i, j) += eta * rng.next_gaussian();
                    }
            }
        }
        eng.project(Pi, Phi, opts.shrink_tolerance);

        // Adam with per-iterate feasibility projection.
        std::vector<Mat> mPi(n, Mat::Zero(model.n_x, model.n_x)), vPi = mPi;
        std::vector<Mat> mPhi = mPi, vPhi = mPi;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-12;
        double localBest = std::numeric_limits<double>::infinity();
        long stall = 0;
        std::vector<Mat> gPi, gPhi;
        for (long it = 1; it <= opts.max_iters; ++it) {
            const auto cache = eng.forward(Pi, Phi);
            if (cache.objective < localBest - std::abs(localBest) * opts.convergence_tol)
                stall = 0;
            else if (++stall > 800)
                break;
            if (cache.objective < localBest) localBest = cache.objective;
            if (cache.objective < bestObj) {
                bestObj = cache.objective;
                bestPi = Pi;
                bestPhi = Phi;
            }
            eng.gradients(Pi, Phi, cache, gPi, gPhi);
            const double c1 = 1.0 - std::pow(b1, static_cast<double>(it));
            const double c2 = 1.0 - std::pow(b2, static_cast<double>(it));
            for (Index k = 0; k < n; ++k) {
                mPi[k] = b1 * mPi[k] + (1 - b1) * gPi[k];
                vPi[k] = b2 * vPi[k] + (1 - b2) * gPi[k].cwiseProduct(gPi[k]);
                Pi[k] -= opts.step_size *
                         (mPi[k] / c1).cwiseQuotient(((vPi[k] / c2).cwiseSqrt().array() + eps).matrix());
                mPhi[k] = b1 * mPhi[k] + (1 - b1) * gPhi[k];
                vPhi[k] = b2 * vPhi[k] + (1 - b2) * gPhi[k].cwiseProduct(gPhi[k]);
                Phi[k] -= opts.step_size *
                          (mPhi[k] / c1).cwiseQuotient(((vPhi[k] / c2).cwiseSqrt().array() + eps).matrix());
            }
            eng.project(Pi, Phi, opts.shrink_tolerance);
        }
    }

    GainSchedule out = eng.make_schedule(bestPi, bestPhi);
    out.converged = bestObj < warmObj - std::abs(warmObj) * 1e-12;
    return out;
}

/// Randomized lower bound for max tr(Pi M B) s.t. Q - Pi M Pi^T >= 0: draws
/// Gaussian coefficient matrices and pushes each to the feasibility boundary
/// by scaling. Never exceeds the dual value.
inline double per_step_search(const Mat& Q, const Mat& M, const Mat& B, long n_samples,
                              std::uint64_t seed) {
    check_psd(Q, "per_step_search: Q");
    check_psd(M, "per_step_search: M");
    check_psd(B, "per_step_search: B");
    const Index n = Q.rows();
    if (M.norm() == 0.0) return 0.0;
    const Mat q_half_pinv = pinv_sqrt_psd(Q);
    const Mat q_proj = Mat::Identity(n, n) - Q * pinv_psd(Q);  // kernel projector
    const double qn = std::max(Q.norm(), 1e-300);
    Philox rng(seed, 0x70657273ull);
    double best = 0.0;
    Mat Pi(n, n);
    for (long s = 0; s < n_samples; ++s) {
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) Pi(i, j) = rng.next_gaussian();
        const Mat load = symmetrize(Pi * M * Pi.transpose());
        if ((q_proj * load * q_proj).norm() > 1e-12 * qn) continue;  // leaves im(Q)
        const double lam = sym_eig(symmetrize(q_half_pinv * load * q_half_pinv)).values.maxCoeff();
        if (lam <= 0.0) continue;
        const double c = 1.0 / std::sqrt(lam);
        const double val = std::abs(c * (Pi * M * B).trace());
        best = std::max(best, val);
    }
    return best;
}

/// Result of the desk-scale direct optimization over the full linear filter
/// class: the minimal weighted cost and the achieving full coefficient
/// matrix (block lower triangular, (T+1) n_x by (T+1) n_y).
struct DirectOracleResult {
    double cost = 0.0;           // sum_k alpha_k E||x_k - x_hat_k||^2 at the optimum
    double correlation = 0.0;    // achieved 2 tr(Phi S K^T B)
    Mat Phi;                     // coefficients of J = Phi I + W in original coordinates
    double constraint_min_eig = 0.0;  // certificate: min eig of I - Phi_hat Phi_hat^T
};

inline DirectOracleResult direct_oracle(const ModelSpec& model, const ObjectiveSpec& objective,
                                        const OptimizerOptions& opts = {}) {
    model.validate();
    const Index T = model.T;
    const Index nx = model.n_x, ny = model.n_y;
    if (nx * (T + 1) > 16)
        throw ScaleExceeded("direct_oracle: n_x (T+1) exceeds the desk-scale bound 16");
    const Vec alpha = objective.weights(model);
    const KalmanGains g = kalman_gains(model);

    // Block state-propagation matrix: row k, col t holds A_k ... A_{t+1}.
    const Index NX = (T + 1) * nx, NY = (T + 1) * ny;
    Mat AJ = Mat::Zero(NX, NX);
    for (Index t = 0; t <= T; ++t) {
        Mat prod = Mat::Identity(nx, nx);
        AJ.block(t * nx, t * nx, nx, nx) = prod;
        for (Index k = t + 1; k <= T; ++k) {
            prod = model.A(k) * prod;
            AJ.block(k * nx, t * nx, nx, nx) = prod;
        }
    }
    Mat W = Mat::Zero(NX, NX);
    for (Index k = 0; k <= T; ++k)
        W.block(k * nx, k * nx, nx, nx) = alpha[k] * Mat::Identity(nx, nx);
    const Mat Bfull = AJ.transpose() * W * AJ;
    Mat Kd = Mat::Zero(NX, NY), Sd = Mat::Zero(NY, NY), Qd = Mat::Zero(NX, NX);
    for (Index k = 0; k <= T; ++k) {
        Kd.block(k * nx, k * ny, nx, ny) = g.K[k];
        Sd.block(k * ny, k * ny, ny, ny) = g.S[k];
        Qd.block(k * nx, k * nx, nx, nx) = model.Qeff(k);
    }

    // Whiten per step: innovations onto the positive eigenspace of S_k,
    // updates onto the positive eigenspace of Qeff_k. In the new
    // coordinates the perceptual constraint is || Phi_hat ||_op <= 1 and
    // causality stays block lower triangular.
    std::vector<Mat> s_basis(T + 1), q_basis(T + 1);
    std::vector<Index> mdim(T + 1), pdim(T + 1), moff(T + 2, 0), poff(T + 2, 0);
    std::vector<Mat> s_half(T + 1), s_half_inv(T + 1), q_half(T + 1);
    for (Index k = 0; k <= T; ++k) {
        const SymEig es = sym_eig(g.S[k]);
        const SymEig eq = sym_eig(model.Qeff(k));
        const double sthr = kRankTol * std::max(es.values.maxCoeff(), 0.0);
        const double qthr = kRankTol * std::max(eq.values.maxCoeff(), 0.0);
        Index ms = 0, ps = 0;
        for (Index i = 0; i < es.values.size(); ++i) ms += es.values[i] > sthr ? 1 : 0;
        for (Index i = 0; i < eq.values.size(); ++i) ps += eq.values[i] > qthr ? 1 : 0;
        mdim[k] = ms;
        pdim[k] = ps;
        s_basis[k] = Mat(ny, ms);
        s_half[k] = Mat::Zero(ms, ms);
        s_half_inv[k] = Mat::Zero(ms, ms);
        Index c = 0;
        for (Index i = 0; i < es.values.size(); ++i)
            if (es.values[i] > sthr) {
                s_basis[k].col(c) = es.vectors.col(i);
                s_half[k](c, c) = std::sqrt(es.values[i]);
                s_half_inv[k](c, c) = 1.0 / std::sqrt(es.values[i]);
                ++c;
            }
        q_basis[k] = Mat(nx, ps);
        q_half[k] = Mat::Zero(ps, ps);
        c = 0;
        for (Index i = 0; i < eq.values.size(); ++i)
            if (eq.values[i] > qthr) {
                q_basis[k].col(c) = eq.vectors.col(i);
                q_half[k](c, c) = std::sqrt(eq.values[i]);
                ++c;
            }
        moff[k + 1] = moff[k] + ms;
        poff[k + 1] = poff[k] + ps;
    }
    const Index P = poff[T + 1], Mtot = moff[T + 1];

    // C_hat = Lam^{1/2} U^T K^T B V Gam^{1/2}, per block pair.
    const Mat KtB = Kd.transpose() * Bfull;
    Mat Chat = Mat::Zero(Mtot, P);
    for (Index t = 0; t <= T; ++t)
        for (Index k = 0; k <= T; ++k)
            Chat.block(moff[t], poff[k], mdim[t], pdim[k]) =
                s_half[t] * s_basis[t].transpose() *
                KtB.block(t * ny, k * nx, ny, nx) * q_basis[k] * q_half[k];

    auto mask_lower = [&](Mat& X) {
        for (Index k = 0; k <= T; ++k)
            for (Index t = k + 1; t <= T; ++t)
                X.block(poff[k], moff[t], pdim[k], mdim[t]).setZero();
    };

    // Log-barrier ascent of 2 tr(Phat C) + mu logdet(I - Phat Phat^T).
    Mat Phat = Mat::Zero(P, Mtot);
    double mu = 2.0 * Chat.norm() + 1.0;
    auto barrier_value = [&](const Mat& X, double m_, double* min_eig_out = nullptr) {
        const Mat Fm = Mat::Identity(P, P) - X * X.transpose();
        const SymEig e = sym_eig(Fm);
        if (min_eig_out) *min_eig_out = e.values.minCoeff();
        if (e.values.minCoeff() <= 0.0) return -std::numeric_limits<double>::infinity();
        double ld = 0.0;
        for (Index i = 0; i < e.values.size(); ++i) ld += std::log(e.values[i]);
        return 2.0 * (X * Chat).trace() + m_ * ld;
    };
    for (int outer = 0; outer < opts.barrier_outer; ++outer) {
        double step = 0.25;
        double fcur = barrier_value(Phat, mu);
        for (long it = 0; it < opts.barrier_inner; ++it) {
            const Mat Fm = Mat::Identity(P, P) - Phat * Phat.transpose();
            Mat grad = 2.0 * Chat.transpose() - 2.0 * mu * (Fm.llt().solve(Phat));
            mask_lower(grad);
            const double gn = grad.norm();
            if (gn < 1e-13 * (1.0 + std::abs(fcur))) break;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                Mat cand = Phat + step * grad;
                const double fc = barrier_value(cand, mu);
                if (fc > fcur) {
                    Phat = std::move(cand);
                    fcur = fc;
                    step = std::min(step * 1.5, 1e3);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        mu *= 0.5;
    }

    DirectOracleResult res;
    res.correlation = 2.0 * (Phat * Chat).trace();
    {
        const Mat Fm = Mat::Identity(P, P) - Phat * Phat.transpose();
        res.constraint_min_eig = sym_eig(Fm).values.minCoeff();
    }
    // Back to original coordinates: Phi = V Gam^{1/2} Phat Lam^{-1/2} U^T.
    res.Phi = Mat::Zero(NX, NY);
    for (Index k = 0; k <= T; ++k)
        for (Index t = 0; t <= k; ++t)
            res.Phi.block(k * nx, t * ny, nx, ny) =
                q_basis[k] * q_half[k] * Phat.block(poff[k], moff[t], pdim[k], mdim[t]) *
                s_half_inv[t] * s_basis[t].transpose();

    double dstar_cost = 0.0;
    for (Index k = 0; k <= T; ++k) dstar_cost += alpha[k] * g.dstar(k);
    const double quad = (W * (AJ * Qd * AJ.transpose())).trace() +
                        (W * (AJ * Kd * Sd * Kd.transpose() * AJ.transpose())).trace();
    res.cost = dstar_cost + quad - res.correlation;
    return res;
}

/// Weighted total cost sum_k alpha_k (d*_k + tr D_k) of a schedule — the
/// quantity the three solution routes are compared on.
inline double schedule_total_cost(const ModelSpec& model, const KalmanGains& g,
                                  const GainSchedule& s, const ObjectiveSpec& objective) {
    const Vec alpha = objective.weights(model);
    const std::vector<Mat> dks =
        s.kind == ScheduleKind::Recursive ? dk_recursive(model, g, s) : dk_pkf(model, g, s);
    double cost = 0.0;
    for (Index k = 0; k <= model.T; ++k) cost += alpha[k] * (g.dstar(k) + dks[k].trace());
    return cost;
}

}  // namespace pkf
