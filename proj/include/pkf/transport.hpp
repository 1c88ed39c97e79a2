// Gaussian optimal transport: the map realizing the MSE-optimal estimator
// with a prescribed output covariance, and the closed-form Wasserstein-2
// (Gelbrich) distance between Gaussians used as the quality metric.
#pragma once

#include <cmath>
#include <vector>

#include "pkf/psd.hpp"
#include "pkf/types.hpp"

namespace pkf {

struct TransportMap {
    Mat T_star;   // applied to the conditional-mean estimate
    Mat Sigma_w;  // covariance of the independent completion noise
};

/// Map a Gaussian with covariance Sigma_xstar onto one with covariance
/// Sigma_x:
///   T* = Sigma_x Sigma_xstar^{1/2} (Sigma_xstar^{1/2} Sigma_x
///        Sigma_xstar^{1/2})^{1/2 dagger} Sigma_xstar^{1/2 dagger},
///   Sigma_w = Sigma_x - T* Sigma_xstar T*^T.
/// Valid for merely PSD inputs (either covariance may be rank-deficient).
inline TransportMap transport_map(const Mat& sigma_x, const Mat& sigma_xstar) {
    check_psd(sigma_x, "transport_map: Sigma_x");
    check_psd(sigma_xstar, "transport_map: Sigma_xstar");
    require(sigma_x.rows() == sigma_xstar.rows(), "transport_map: dimension mismatch");

    const Mat s = sqrt_psd(sigma_xstar);
    const Mat s_pinv = pinv_sqrt_psd(sigma_xstar);
    const Mat inner = sqrt_psd(symmetrize(s * sigma_x * s));
    TransportMap map;
    map.T_star = sigma_x * s * pinv_psd(inner) * s_pinv;
    map.Sigma_w = clamp_psd(sigma_x - map.T_star * sigma_xstar * map.T_star.transpose());
    return map;
}

/// Wasserstein-2 distance between N(mu1, Sigma1) and N(mu2, Sigma2):
///   d^2 = ||mu1 - mu2||^2
///       + tr(Sigma1 + Sigma2 - 2 (Sigma1^{1/2} Sigma2 Sigma1^{1/2})^{1/2}).
inline double gelbrich_distance(const Vec& mu1, const Mat& sigma1, const Vec& mu2,
                                const Mat& sigma2) {
    require(mu1.size() == mu2.size() && sigma1.rows() == sigma2.rows() &&
                mu1.size() == sigma1.rows(),
            "gelbrich_distance: dimension mismatch");
    check_psd(sigma1, "gelbrich_distance: Sigma1");
    check_psd(sigma2, "gelbrich_distance: Sigma2");
    const Mat s1 = sqrt_psd(sigma1);
    const Mat cross = sqrt_psd(symmetrize(s1 * sigma2 * s1));
    double d2 = (mu1 - mu2).squaredNorm() + sigma1.trace() + sigma2.trace() - 2.0 * cross.trace();
    if (d2 < 0.0) d2 = 0.0;  // round-off inside the trace
    return std::sqrt(d2);
}

inline double gelbrich_distance(const Mat& sigma1, const Mat& sigma2) {
    return gelbrich_distance(Vec::Zero(sigma1.rows()), sigma1, Vec::Zero(sigma2.rows()), sigma2);
}

/// Sample mean and (1/N)-normalized sample covariance, clamped PSD.
inline std::pair<Vec, Mat> fit_gaussian(const std::vector<Vec>& samples) {
    if (samples.size() < 2) throw TooFewSamples("fit_gaussian: need at least 2 samples");
    const Index n = samples.front().size();
    Vec mean = Vec::Zero(n);
    for (const Vec& s : samples) {
        require(s.size() == n, "fit_gaussian: inconsistent sample dims");
        mean += s;
    }
    mean /= static_cast<double>(samples.size());
    Mat cov = Mat::Zero(n, n);
    for (const Vec& s : samples) {
        const Vec d = s - mean;
        cov.selfadjointView<Eigen::Lower>().rankUpdate(d, 1.0);
    }
    cov = Mat(cov.selfadjointView<Eigen::Lower>());
    cov /= static_cast<double>(samples.size());
    return {mean, clamp_psd(cov)};
}

}  // namespace pkf
