#include "pkf/kalman.hpp"

#include <vector>

#include "helpers.hpp"
#include "pkf/demos.hpp"
#include "pkf/parallel.hpp"

using namespace pkf;

namespace {

ModelSpec scalar_model(double a, double c, double q, double r, double p0, Index T) {
    ModelSpec m;
    m.n_x = 1;
    m.n_y = 1;
    m.T = T;
    m.A_seq = {a * Mat::Identity(1, 1)};
    m.C_seq = {c * Mat::Identity(1, 1)};
    m.Q_seq = {q * Mat::Identity(1, 1)};
    m.R_seq = {r * Mat::Identity(1, 1)};
    m.P0 = p0 * Mat::Identity(1, 1);
    m.alpha = Vec::Ones(T + 1);
    return m;
}

/// Brute-force oracle: P_{k|k} from direct joint-Gaussian conditioning of
/// x_k on (y_0..y_k), built from the scalar model's moment recursions.
double conditioned_variance(const ModelSpec& m, Index k) {
    const double a = m.A_seq[0](0, 0), c = m.C_seq[0](0, 0);
    const double q = m.Q_seq[0](0, 0), r = m.R_seq[0](0, 0);
    // Cov(x_i, x_j) = a^{|i-j|} * Sigma_min(i,j) in the scalar case.
    std::vector<double> sig(m.T + 1);
    sig[0] = m.P0(0, 0);
    for (Index t = 1; t <= m.T; ++t) sig[t] = a * a * sig[t - 1] + q;
    auto cov_xx = [&](Index i, Index j) {
        const Index lo = std::min(i, j);
        return std::pow(a, static_cast<double>(std::max(i, j) - lo)) * sig[lo];
    };
    Mat cyy(k + 1, k + 1);
    Vec cxy(k + 1);
    for (Index i = 0; i <= k; ++i) {
        cxy[i] = c * cov_xx(k, i);
        for (Index j = 0; j <= k; ++j) cyy(i, j) = c * c * cov_xx(i, j) + (i == j ? r : 0.0);
    }
    return sig[k] - cxy.dot(cyy.ldlt().solve(cxy));
}

}  // namespace

TEST_CASE("zero observation matrix gives zero gain and the prior covariance") {
    ModelSpec m = harmonic_oscillator_model(8);
    m.C_seq = {Mat::Zero(1, 2)};
    const KalmanGains g = kalman_gains(m);
    for (Index k = 0; k <= m.T; ++k) {
        CHECK(g.K[k].norm() == 0.0);
        CHECK(g.P_post[k].isApprox(state_covariance(m, k), 1e-10));
    }
}

TEST_CASE("perfect observation collapses the posterior") {
    ModelSpec m = harmonic_oscillator_model(6);
    m.n_y = 2;
    m.C_seq = {Mat::Identity(2, 2)};
    m.R_seq = {Mat::Zero(2, 2)};
    const KalmanGains g = kalman_gains(m);
    for (Index k = 0; k <= m.T; ++k) {
        CHECK(g.P_post[k].norm() <= 1e-10);
        CHECK((g.K[k] * m.C(k) - Mat::Identity(2, 2)).norm() <= 1e-8);
    }
}

TEST_CASE("posterior matches brute-force joint-Gaussian conditioning") {
    const ModelSpec m = scalar_model(0.9, 1.0, 1.0, 1.0, 1.0, 12);
    const KalmanGains g = kalman_gains(m);
    for (Index k = 0; k <= m.T; ++k) {
        const double want = conditioned_variance(m, k);
        REQUIRE(g.P_post[k](0, 0) == Catch::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("posterior never exceeds the prior as a quadratic form") {
    const ModelSpec m = pendulums_model(64);
    const KalmanGains g = kalman_gains(m);
    for (Index k = 0; k <= m.T; ++k) {
        REQUIRE(min_eigenvalue(g.P_prior[k] - g.P_post[k]) >= -1e-12 * g.P_prior[k].norm());
        REQUIRE(is_psd(g.M[k]));
        REQUIRE(is_psd(g.P_post[k], 0.0));
    }
}

TEST_CASE("zero measurements with zero observation matrix give zero states") {
    ModelSpec m = harmonic_oscillator_model(5);
    m.C_seq = {Mat::Zero(1, 2)};
    const std::vector<Vec> y(m.T + 1, Vec::Zero(1));
    const KalmanRun run = kalman_filter(m, y);
    for (const Vec& x : run.x_star) CHECK(x.norm() == 0.0);
}

TEST_CASE("degenerate two-step model pins the optimal states") {
    // C_0 = 0 and R = 0: the filter must output x*_0 = 0, then x*_1 = y_1.
    const ModelSpec m = example1_model();
    const KalmanGains g = kalman_gains(m);
    std::vector<Vec> y{Vec::Zero(1), 0.37 * Vec::Ones(1)};
    const KalmanRun run = kalman_filter(m, g, y);
    CHECK(run.x_star[0][0] == 0.0);
    CHECK(run.x_star[1][0] == Catch::Approx(0.37));
    CHECK(g.P_post[1].norm() <= 1e-12);
}

TEST_CASE("innovations are white with covariance S_k") {
    const ModelSpec m = harmonic_oscillator_model(8);
    const KalmanGains g = kalman_gains(m);
    const TrajectorySampler sampler(m);
    const long n = 100000;
    const Index steps = m.T + 1;
    const int workers = worker_count();
    std::vector<Mat> acc(workers, Mat::Zero(steps, steps));
    parallel_for_chunks(n, [&](long lo, long hi) {
        const int slot = static_cast<int>(lo * workers / n);
        Mat local = Mat::Zero(steps, steps);
        Vec innov(steps);
        for (long i = lo; i < hi; ++i) {
            const Trajectory t = sampler.sample(555, static_cast<std::uint64_t>(i));
            const KalmanRun run = kalman_filter(m, g, t.measurements);
            for (Index k = 0; k < steps; ++k) innov[k] = run.innovation[k][0];
            local += innov * innov.transpose();
        }
        acc[slot] += local;
    });
    Mat emp = Mat::Zero(steps, steps);
    for (const Mat& a : acc) emp += a;
    emp /= static_cast<double>(n);
    for (Index k = 0; k < steps; ++k) {
        const double sk = g.S[k](0, 0);
        REQUIRE(std::abs(emp(k, k) - sk) <= 3.0 * sk * std::sqrt(2.0 / n));
        for (Index j = 0; j < k; ++j) {
            const double corr = emp(k, j) / std::sqrt(emp(k, k) * emp(j, j));
            REQUIRE(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST_CASE("empirical Kalman MSE matches tr(P_post)") {
    const ModelSpec m = harmonic_oscillator_model(16);
    const KalmanGains g = kalman_gains(m);
    const TrajectorySampler sampler(m);
    const long n = 20000;
    const Index steps = m.T + 1;
    {
        std::vector<double> sum(steps, 0.0), sumsq(steps, 0.0);
        for (long i = 0; i < n; ++i) {
            const Trajectory t = sampler.sample(812, static_cast<std::uint64_t>(i));
            const KalmanRun run = kalman_filter(m, g, t.measurements);
            for (Index k = 0; k < steps; ++k) {
                const double e = (run.x_star[k] - t.states[k]).squaredNorm();
                sum[k] += e;
                sumsq[k] += e * e;
            }
        }
        for (Index k = 0; k < steps; ++k) {
            const double mean = sum[k] / n;
            const double se = std::sqrt(
                std::max(0.0, sumsq[k] / n - mean * mean) / static_cast<double>(n));
            REQUIRE(std::abs(mean - g.dstar(k)) <= 3.0 * se);
        }
    }
}

TEST_CASE("measurement length is validated") {
    const ModelSpec m = harmonic_oscillator_model(4);
    std::vector<Vec> y(3, Vec::Zero(1));
    CHECK_THROWS_AS(kalman_filter(m, y), DimensionMismatch);
}
