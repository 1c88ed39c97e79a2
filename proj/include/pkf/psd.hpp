// Primitives for symmetric positive-semidefinite matrices.
//
// All rank decisions go through one symmetric eigendecomposition backend with
// a shared relative threshold, so square roots and pseudoinverses that get
// composed (e.g. sqrt then pinv of the same matrix) agree about the rank.
#pragma once

#include <cmath>
#include <sstream>

#include "pkf/types.hpp"

namespace pkf {

/// Default relative rank threshold: eigenvalues below rank_tol * lambda_max
/// are treated as zero.
inline constexpr double kRankTol = 1e-10;

/// Relative tolerance for accepting slightly-negative eigenvalues as
/// round-off before declaring an input not PSD.
inline constexpr double kPsdTol = 1e-9;

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

inline void check_square(const Mat& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw DimensionMismatch(os.str());
    }
}

inline void check_symmetric(const Mat& m, const char* who) {
    check_square(m, who);
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        std::ostringstream os;
        os << who << ": matrix is not symmetric (max asymmetry " << asym << ")";
        throw DimensionMismatch(os.str());
    }
}

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns
};

inline SymEig sym_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    if (es.info() != Eigen::Success) throw NoConvergence("sym_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// True iff all eigenvalues are >= -tol * max(|lambda|, with tol relative.
inline bool is_psd(const Mat& m, double tol = kPsdTol) {
    check_symmetric(m, "is_psd");
    const SymEig e = sym_eig(m);
    const double scale = e.values.cwiseAbs().maxCoeff();
    return e.values.minCoeff() >= -tol * (scale > 0 ? scale : 1.0);
}

inline void check_psd(const Mat& m, const char* who, double tol = kPsdTol) {
    check_symmetric(m, who);
    const SymEig e = sym_eig(m);
    const double scale = e.values.cwiseAbs().maxCoeff();
    if (e.values.minCoeff() < -tol * (scale > 0 ? scale : 1.0)) {
        std::ostringstream os;
        os << who << ": eigenvalue " << e.values.minCoeff() << " below -" << tol
           << " * " << scale;
        throw NotPSD(os.str());
    }
}

/// Symmetric PSD square root. Negative eigenvalues within tolerance are
/// clamped to zero; below tolerance the input is rejected. Eigenvalues under
/// the shared rank threshold are zeroed rather than square-rooted, so a
/// pseudoinverse taken downstream of the root sees the same rank as a
/// pseudoinverse of the input itself.
inline Mat sqrt_psd(const Mat& m, double tol = kPsdTol) {
    check_psd(m, "sqrt_psd", tol);
    SymEig e = sym_eig(m);
    const double thr = kRankTol * std::max(e.values.maxCoeff(), 0.0);
    Vec w(e.values.size());
    for (Index i = 0; i < w.size(); ++i) w[i] = e.values[i] > thr ? std::sqrt(e.values[i]) : 0.0;
    return symmetrize(e.vectors * w.asDiagonal() * e.vectors.transpose());
}

/// Moore-Penrose inverse of a symmetric PSD matrix. Eigenvalues below
/// rank_tol * lambda_max count as zero.
inline Mat pinv_psd(const Mat& m, double rank_tol = kRankTol) {
    check_psd(m, "pinv_psd");
    SymEig e = sym_eig(m);
    const double thr = rank_tol * std::max(e.values.maxCoeff(), 0.0);
    Vec w(e.values.size());
    for (Index i = 0; i < w.size(); ++i) w[i] = e.values[i] > thr ? 1.0 / e.values[i] : 0.0;
    return symmetrize(e.vectors * w.asDiagonal() * e.vectors.transpose());
}

/// Pseudoinverse of the PSD square root, with the same rank decisions as
/// pinv_psd(m) itself.
inline Mat pinv_sqrt_psd(const Mat& m, double rank_tol = kRankTol) {
    check_psd(m, "pinv_sqrt_psd");
    SymEig e = sym_eig(m);
    const double thr = rank_tol * std::max(e.values.maxCoeff(), 0.0);
    Vec w(e.values.size());
    for (Index i = 0; i < w.size(); ++i)
        w[i] = e.values[i] > thr ? 1.0 / std::sqrt(e.values[i]) : 0.0;
    return symmetrize(e.vectors * w.asDiagonal() * e.vectors.transpose());
}

/// Nearest (Frobenius) PSD matrix to a symmetric input: clip negative
/// eigenvalues at zero. Idempotent, and the result re-checks as PSD with no
/// tolerance (reconstruction round-off is lifted by a diagonal shift at the
/// noise floor).
inline Mat clamp_psd(const Mat& m) {
    check_symmetric(m, "clamp_psd");
    SymEig e = sym_eig(m);
    if (e.values.minCoeff() >= 0.0) return symmetrize(m);
    Vec w = e.values.cwiseMax(0.0);
    Mat out = symmetrize(e.vectors * w.asDiagonal() * e.vectors.transpose());
    for (int pass = 0; pass < 4; ++pass) {
        const double lmin = sym_eig(out).values.minCoeff();
        if (lmin >= 0.0) break;
        // Lift clear of the eigensolver's own noise floor, or the shift can
        // drown in round-off and leave a denormal-scale negative behind.
        const double shift = -lmin + 64.0 * Eigen::NumTraits<double>::epsilon() *
                                         std::max(out.norm(), 1.0);
        out += shift * Mat::Identity(out.rows(), out.cols());
    }
    return out;
}

inline double min_eigenvalue(const Mat& m) {
    return sym_eig(m).values.minCoeff();
}

/// True iff im(sub) is contained in im(sup): the residual of sub after
/// projecting onto im(sup) has norm <= tol * ||sub||.
inline bool image_contained(const Mat& sub, const Mat& sup, double tol = 1e-8) {
    check_square(sub, "image_contained");
    require(sub.rows() == sup.rows(), "image_contained: dimension mismatch");
    const double nsub = sub.norm();
    if (nsub == 0.0) return true;
    const Mat proj = Mat::Identity(sup.rows(), sup.cols()) - sup * pinv_psd(sup);
    return (proj * sub).norm() <= tol * nsub;
}

}  // namespace pkf
