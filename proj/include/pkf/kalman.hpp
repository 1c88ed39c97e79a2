// Classic Kalman filter, exposing every per-step intermediate the perceptual
// filters consume (innovation covariances S_k, gains K_k, update covariances
// M_k = K_k S_k K_k^T, prior/posterior error covariances).
//
// S_k is inverted with the PSD pseudoinverse throughout: models with gated or
// absent observations (C_k = 0, R_k = 0) make S_k exactly singular.
#pragma once

#include <vector>

#include "pkf/model.hpp"
#include "pkf/psd.hpp"
#include "pkf/types.hpp"

namespace pkf {

/// Measurement-independent part of a Kalman pass.
struct KalmanGains {
    std::vector<Mat> K;        // n_x x n_y
    std::vector<Mat> S;        // innovation covariance, n_y x n_y
    std::vector<Mat> M;        // K S K^T, n_x x n_x
    std::vector<Mat> P_prior;  // P_{k|k-1} (P_{0|-1} = P0)
    std::vector<Mat> P_post;   // P_{k|k}

    Index steps() const { return static_cast<Index>(K.size()); }

    /// tr(P_{k|k}), the MMSE floor d*_k.
    double dstar(Index k) const { return P_post.at(k).trace(); }
};

/// One filtered trajectory with its innovations.
struct KalmanRun {
    std::vector<Vec> x_star;      // posterior estimates
    std::vector<Vec> x_prior;     // prior estimates A_k x*_{k-1}
    std::vector<Vec> innovation;  // y_k - C_k x_prior_k
};

inline KalmanGains kalman_gains(const ModelSpec& model) {
    model.validate();
    KalmanGains g;
    const Index n = model.T + 1;
    g.K.resize(n); g.S.resize(n); g.M.resize(n); g.P_prior.resize(n); g.P_post.resize(n);

    Mat P = model.P0;
    for (Index k = 0; k <= model.T; ++k) {
        if (k > 0) P = symmetrize(model.A(k) * P * model.A(k).transpose() + model.Q(k));
        g.P_prior[k] = P;
        const Mat& C = model.C(k);
        const Mat S = symmetrize(C * P * C.transpose() + model.R(k));
        const Mat K = P * C.transpose() * pinv_psd(S);
        g.S[k] = S;
        g.K[k] = K;
        g.M[k] = symmetrize(K * S * K.transpose());
        P = clamp_psd(P - K * C * P);
        g.P_post[k] = P;
    }
    return g;
}

inline KalmanRun kalman_filter(const ModelSpec& model, const KalmanGains& gains,
                               const std::vector<Vec>& Y) {
    require(static_cast<Index>(Y.size()) == model.T + 1, "kalman_filter: Y must have T+1 entries");
    for (const Vec& y : Y) require(y.size() == model.n_y, "kalman_filter: measurement dims");

    KalmanRun run;
    const Index n = model.T + 1;
    run.x_star.resize(n); run.x_prior.resize(n); run.innovation.resize(n);

    Vec x = Vec::Zero(model.n_x);
    for (Index k = 0; k <= model.T; ++k) {
        const Vec prior = (k == 0) ? Vec(Vec::Zero(model.n_x)) : Vec(model.A(k) * x);
        const Vec innov = Y[k] - model.C(k) * prior;
        x = prior + gains.K[k] * innov;
        run.x_prior[k] = prior;
        run.innovation[k] = innov;
        run.x_star[k] = x;
    }
    return run;
}

inline KalmanRun kalman_filter(const ModelSpec& model, const std::vector<Vec>& Y) {
    return kalman_filter(model, kalman_gains(model), Y);
}

}  // namespace pkf
