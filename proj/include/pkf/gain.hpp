// Closed-form solutions of the per-step extremal problem
//
//   max_Pi  tr(Pi M B)   s.t.   Q - Pi M Pi^T >= 0,
//
// the weight matrices B_k it is driven by, and the strong-duality
// certificate that pins the optimal value independently of the maximizer.
#pragma once

#include <vector>

#include "pkf/psd.hpp"
#include "pkf/types.hpp"

namespace pkf {

struct WeightSchedule {
    std::vector<Mat> B;  // B_0..B_T
};

/// B_k = sum_{t=k}^T alpha_t (A^{t-k})^T A^{t-k}, computed by the backward
/// recursion B_k = alpha_k I + A^T B_{k+1} A with B_{T+1} = 0. Requires a
/// time-invariant A.
inline WeightSchedule weight_matrices(const Mat& A, const Vec& alpha, Index T) {
    check_square(A, "weight_matrices");
    require(alpha.size() == T + 1, "weight_matrices: alpha must have T+1 entries");
    WeightSchedule w;
    w.B.resize(T + 1);
    Mat B = Mat::Zero(A.rows(), A.cols());
    const Mat I = Mat::Identity(A.rows(), A.cols());
    for (Index k = T; k >= 0; --k) {
        B = symmetrize(alpha[k] * I + A.transpose() * B * A);
        w.B[k] = B;
    }
    return w;
}

/// Optimal coefficient
///   Pi* = Q M_B^{1/2} (M_B^{1/2} Q M_B^{1/2})^{1/2 dagger} M_B^{1/2 dagger}
///         B M M^dagger,   with  M_B = B M B.
///
/// Optimality requires im(B M B) subset of im(Q); when that fails the formula
/// is still evaluated (it yields the forced Pi = 0 when Q = 0) and *image_ok
/// reports the violation. Feasibility Q - Pi* M Pi*^T >= 0 holds whenever the
/// assumption does.
inline Mat pkf_gain(const Mat& Q, const Mat& M, const Mat& B, bool* image_ok = nullptr) {
    check_psd(Q, "pkf_gain: Q");
    check_psd(M, "pkf_gain: M");
    check_psd(B, "pkf_gain: B");
    require(Q.rows() == M.rows() && Q.rows() == B.rows(), "pkf_gain: dimension mismatch");
    const Mat MB = symmetrize(B * M * B);
    if (image_ok) *image_ok = image_contained(MB, Q);
    const Mat mb_sqrt = sqrt_psd(MB);
    const Mat mb_sqrt_pinv = pinv_sqrt_psd(MB);
    const Mat core = pinv_psd(sqrt_psd(symmetrize(mb_sqrt * Q * mb_sqrt)));
    Mat Pi = Q * mb_sqrt * core * mb_sqrt_pinv * B * M * pinv_psd(M);
    // The composition of pseudoinverses can overshoot the boundary by
    // round-off on ill-conditioned inputs; pull back radially when it does.
    const double qn = std::max(Q.norm(), 1e-300);
    const Mat W = symmetrize(Pi * M * Pi.transpose());
    if (min_eigenvalue(Q - W) < -1e-12 * qn) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double c = 0.5 * (lo + hi);
            (min_eigenvalue(Q - c * c * W) >= -1e-12 * qn ? lo : hi) = c;
        }
        Pi *= lo;
    }
    return Pi;
}

/// The optimal objective value tr((M_B^{1/2} Q M_B^{1/2})^{1/2}).
inline double pkf_gain_value(const Mat& Q, const Mat& M, const Mat& B) {
    const Mat MB = symmetrize(B * M * B);
    const Mat mb_sqrt = sqrt_psd(MB);
    return sqrt_psd(symmetrize(mb_sqrt * Q * mb_sqrt)).trace();
}

/// Closed form under the alternative assumption im(M) subset of im(Q):
///   Pi* = Q Bt M_b^{1/2} (M_b^{1/2} Q_b M_b^{1/2})^{1/2 dagger}
///         M_b^{1/2 dagger} Bt,
/// with Bt = B^{1/2}, Q_b = Bt Q Bt, M_b = Bt M Bt.
inline Mat pkf_gain_alt(const Mat& Q, const Mat& M, const Mat& B) {
    check_psd(Q, "pkf_gain_alt: Q");
    check_psd(M, "pkf_gain_alt: M");
    check_psd(B, "pkf_gain_alt: B");
    require(Q.rows() == M.rows() && Q.rows() == B.rows(), "pkf_gain_alt: dimension mismatch");
    if (!image_contained(M, Q))
        throw AssumptionViolated("pkf_gain_alt: im(M) not contained in im(Q)");
    const Mat Bt = sqrt_psd(B);
    const Mat Qb = symmetrize(Bt * Q * Bt);
    const Mat Mb = symmetrize(Bt * M * Bt);
    const Mat mb_sqrt = sqrt_psd(Mb);
    const Mat mb_sqrt_pinv = pinv_sqrt_psd(Mb);
    const Mat core = pinv_psd(sqrt_psd(symmetrize(mb_sqrt * Qb * mb_sqrt)));
    return Q * Bt * mb_sqrt * core * mb_sqrt_pinv * Bt;
}

/// Optimal dual pair of the extremal problem. `value` is the primal optimum
/// tr((M_B^{1/2} Q M_B^{1/2})^{1/2}); the dual objective
/// Q . S* + M . (B Sm* B) equals 2 * value.
struct DualCertificate {
    Mat S_star;
    Mat S_minus_star;
    double value = 0.0;

    double dual_objective(const Mat& Q, const Mat& M, const Mat& B) const {
        return (Q.cwiseProduct(S_star)).sum() +
               (M.cwiseProduct(B * S_minus_star * B)).sum();
    }
};

inline DualCertificate dual_certificate(const Mat& Q, const Mat& M, const Mat& B) {
    check_psd(Q, "dual_certificate: Q");
    check_psd(M, "dual_certificate: M");
    check_psd(B, "dual_certificate: B");
    const Mat MB = symmetrize(B * M * B);
    if (!image_contained(MB, Q))
        throw AssumptionViolated("dual_certificate: im(BMB) not contained in im(Q)");
    const Mat mb_sqrt = sqrt_psd(MB);
    const Mat mb_sqrt_pinv = pinv_sqrt_psd(MB);
    const Mat inner = sqrt_psd(symmetrize(mb_sqrt * Q * mb_sqrt));
    DualCertificate cert;
    cert.S_star = symmetrize(mb_sqrt * pinv_psd(inner) * mb_sqrt);
    cert.S_minus_star = symmetrize(mb_sqrt_pinv * inner * mb_sqrt_pinv);
    cert.value = inner.trace();
    return cert;
}

}  // namespace pkf
