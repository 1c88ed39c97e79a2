// Shared helpers for the unit tests: random PSD factories and tolerances.
#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "pkf/psd.hpp"
#include "pkf/rng.hpp"
#include "pkf/types.hpp"

namespace pkf::test {

inline Mat rand_mat(Philox& rng, Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.next_gaussian();
    return m;
}

/// Random PSD matrix of the given rank (full rank by default).
inline Mat rand_psd(Philox& rng, Index n, Index rank = -1) {
    if (rank < 0) rank = n;
    const Mat g = rand_mat(rng, n, rank);
    return symmetrize(g * g.transpose());
}

/// Random strictly positive definite matrix.
inline Mat rand_pd(Philox& rng, Index n, double ridge = 0.5) {
    return rand_psd(rng, n) + ridge * Mat::Identity(n, n);
}

inline double rel_err(const Mat& got, const Mat& want) {
    return (got - want).norm() / (1.0 + want.norm());
}

/// Random PSD matrix of the given rank whose nonzero spectrum lies in
/// [0.1, 10]: rank-deficient but numerically benign.
inline Mat rand_psd_conditioned(Philox& rng, Index n, Index rank) {
    Mat g = rand_mat(rng, n, n);
    const Eigen::HouseholderQR<Mat> qr(g);
    const Mat q = qr.householderQ();
    Vec w = Vec::Zero(n);
    for (Index i = 0; i < rank; ++i) w[i] = 0.1 + 9.9 * rng.next_uniform();
    return symmetrize(q * w.asDiagonal() * q.transpose());
}

}  // namespace pkf::test
