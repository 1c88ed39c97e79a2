#include <vector>

#include "helpers.hpp"
#include "pkf/demos.hpp"
#include "pkf/model.hpp"
#include "pkf/parallel.hpp"
#include "pkf/rng.hpp"

using namespace pkf;

TEST_CASE("Philox streams are deterministic and distinct") {
    Philox a(123, 7), b(123, 7), c(123, 8);
    bool all_equal = true, any_equal_across = false;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_equal_across = any_equal_across || (x == c.next_u64());
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_across);
}

TEST_CASE("Gaussian moments from one long stream") {
    Philox rng(2024);
    const long n = 200000;
    double s = 0, s2 = 0;
    for (long i = 0; i < n; ++i) {
        const double z = rng.next_gaussian();
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 6.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("noiseless degenerate model stays at zero") {
    ModelSpec m;
    m.n_x = 2;
    m.n_y = 1;
    m.T = 5;
    m.A_seq = {2.0 * Mat::Identity(2, 2)};
    m.C_seq = {Mat::Ones(1, 2)};
    m.Q_seq = {Mat::Zero(2, 2)};
    m.R_seq = {Mat::Zero(1, 1)};
    m.P0 = Mat::Zero(2, 2);
    m.alpha = Vec::Ones(6);
    const Trajectory t = sample_trajectory(m, 99);
    for (const Vec& x : t.states) CHECK(x.norm() == 0.0);
    for (const Vec& y : t.measurements) CHECK(y.norm() == 0.0);
}

TEST_CASE("driftless random walk is constant over time") {
    ModelSpec m;
    m.n_x = 1;
    m.n_y = 1;
    m.T = 9;
    m.A_seq = {Mat::Identity(1, 1)};
    m.C_seq = {Mat::Identity(1, 1)};
    m.Q_seq = {Mat::Zero(1, 1)};
    m.R_seq = {Mat::Identity(1, 1)};
    m.P0 = Mat::Identity(1, 1);
    m.alpha = Vec::Ones(10);
    const Trajectory t = sample_trajectory(m, 4);
    for (Index k = 1; k <= m.T; ++k) CHECK(t.states[k][0] == t.states[0][0]);
}

TEST_CASE("resampling with the same seed is bit-identical") {
    const ModelSpec m = harmonic_oscillator_model(32);
    const TrajectorySampler sampler(m);
    const Trajectory a = sampler.sample(1234, 56);
    const Trajectory b = sampler.sample(1234, 56);
    for (Index k = 0; k <= m.T; ++k) {
        REQUIRE(a.states[k] == b.states[k]);
        REQUIRE(a.measurements[k] == b.measurements[k]);
    }
}

TEST_CASE("empirical state covariance matches the analytic recursion") {
    const Index k_at = 10;
    const ModelSpec m = harmonic_oscillator_model(k_at);
    const Mat want = state_covariance(m, k_at);
    const long n = 100000;
    const TrajectorySampler sampler(m);
    const int workers = worker_count();
    std::vector<Mat> acc(workers, Mat::Zero(2, 2));
    parallel_for_chunks(n, [&](long lo, long hi) {
        const int w = static_cast<int>(lo * workers / n);
        Mat local = Mat::Zero(2, 2);
        for (long i = lo; i < hi; ++i) {
            const Trajectory t = sampler.sample(777, static_cast<std::uint64_t>(i));
            local += t.states[k_at] * t.states[k_at].transpose();
        }
        acc[w] += local;
    });
    Mat emp = Mat::Zero(2, 2);
    for (const Mat& a : acc) emp += a;
    emp /= static_cast<double>(n);
    // MC standard error of a covariance entry is about
    // sqrt((S_ii S_jj + S_ij^2) / n).
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            const double se =
                std::sqrt((want(i, i) * want(j, j) + want(i, j) * want(i, j)) / n);
            REQUIRE(std::abs(emp(i, j) - want(i, j)) <= 3.0 * se);
        }
}

TEST_CASE("state covariance basics") {
    const ModelSpec m = example1_model();
    CHECK(state_covariance(m, 0)(0, 0) == 1.0);

    ModelSpec walk;
    walk.n_x = 1;
    walk.n_y = 1;
    walk.T = 2;
    walk.A_seq = {Mat::Identity(1, 1)};
    walk.C_seq = {Mat::Identity(1, 1)};
    walk.Q_seq = {Mat::Identity(1, 1)};
    walk.R_seq = {Mat::Identity(1, 1)};
    walk.P0 = Mat::Identity(1, 1);
    walk.alpha = Vec::Ones(3);
    CHECK(state_covariance(walk, 2)(0, 0) == Catch::Approx(3.0));

    // w = 1 reduces to the marginal covariance
    const ModelSpec hosc = harmonic_oscillator_model(16);
    CHECK(windowed_state_covariance(hosc, 12, 1).isApprox(state_covariance(hosc, 12), 1e-12));
}

TEST_CASE("windowed covariance of the driftless walk is all ones") {
    ModelSpec walk;
    walk.n_x = 1;
    walk.n_y = 1;
    walk.T = 4;
    walk.A_seq = {Mat::Identity(1, 1)};
    walk.C_seq = {Mat::Identity(1, 1)};
    walk.Q_seq = {Mat::Zero(1, 1)};
    walk.R_seq = {Mat::Identity(1, 1)};
    walk.P0 = Mat::Identity(1, 1);
    walk.alpha = Vec::Ones(5);
    CHECK(windowed_state_covariance(walk, 3, 2).isApprox(Mat::Ones(2, 2), 1e-14));
}

TEST_CASE("windowed covariance matches empirical stacked covariance") {
    const ModelSpec m = harmonic_oscillator_model(31);
    const Index k_at = 31, w = 4;
    const Mat want = windowed_state_covariance(m, k_at, w);
    REQUIRE(is_psd(want));
    const long n = 100000;
    const TrajectorySampler sampler(m);
    const int workers = worker_count();
    std::vector<Mat> acc(workers, Mat::Zero(8, 8));
    parallel_for_chunks(n, [&](long lo, long hi) {
        const int slot = static_cast<int>(lo * workers / n);
        Mat local = Mat::Zero(8, 8);
        Vec stacked(8);
        for (long i = lo; i < hi; ++i) {
            const Trajectory t = sampler.sample(31337, static_cast<std::uint64_t>(i));
            for (Index j = 0; j < w; ++j) stacked.segment(2 * j, 2) = t.states[k_at - w + 1 + j];
            local += stacked * stacked.transpose();
        }
        acc[slot] += local;
    });
    Mat emp = Mat::Zero(8, 8);
    for (const Mat& a : acc) emp += a;
    emp /= static_cast<double>(n);
    for (Index i = 0; i < 8; ++i)
        for (Index j = 0; j < 8; ++j) {
            const double se =
                std::sqrt((want(i, i) * want(j, j) + want(i, j) * want(i, j)) / n);
            REQUIRE(std::abs(emp(i, j) - want(i, j)) <= 4.0 * se);
        }
}

TEST_CASE("state covariance converges for the stable pendulum dynamics") {
    // The slowest closed-loop mode has a time constant of roughly a thousand
    // steps, so convergence only shows past that burn-in; increments are
    // block-averaged because the oscillatory modes make them non-monotone.
    const ModelSpec m = pendulums_model(3000);
    const std::vector<Mat> sx = state_covariances(m);
    auto block_avg = [&](Index lo, Index hi) {
        double s = 0.0;
        for (Index k = lo; k < hi; ++k) s += (sx[k + 1] - sx[k]).norm();
        return s / static_cast<double>(hi - lo);
    };
    const double early = block_avg(1000, 1100);
    const double mid = block_avg(1900, 2000);
    const double late = block_avg(2800, 2900);
    CHECK(mid < early);
    CHECK(late < mid);
}

TEST_CASE("model validation rejects inconsistent specs") {
    ModelSpec m = harmonic_oscillator_model(4);
    m.alpha = Vec::Zero(5);
    CHECK_THROWS_AS(m.validate(), DimensionMismatch);
    m = harmonic_oscillator_model(4);
    m.Q_seq = {Mat::Identity(3, 3)};
    CHECK_THROWS_AS(m.validate(), DimensionMismatch);
    m = harmonic_oscillator_model(4);
    m.R_seq = {-Mat::Identity(1, 1)};
    CHECK_THROWS_AS(m.validate(), NotPSD);
}
