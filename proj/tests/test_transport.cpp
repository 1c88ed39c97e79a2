#include "pkf/transport.hpp"

#include <vector>

#include "helpers.hpp"

using namespace pkf;
using pkf::test::rand_mat;
using pkf::test::rand_psd;

TEST_CASE("identity marginals give the identity map with no noise") {
    const TransportMap map = transport_map(Mat::Identity(3, 3), Mat::Identity(3, 3));
    CHECK(map.T_star.isApprox(Mat::Identity(3, 3), 1e-10));
    CHECK(map.Sigma_w.norm() <= 1e-10);
}

TEST_CASE("scalar transport map is the standard-deviation ratio") {
    const TransportMap map =
        transport_map(4.0 * Mat::Identity(1, 1), Mat::Identity(1, 1));
    CHECK(map.T_star(0, 0) == Catch::Approx(2.0));
    CHECK(map.Sigma_w(0, 0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pushforward identity holds including rank-deficient inputs") {
    Philox rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.next_u64() % 5);
        const Mat sx = rand_psd(rng, n);
        const Index rank = 1 + static_cast<Index>(rng.next_u64() % n);
        const Mat sxs = rand_psd(rng, n, rank);
        const TransportMap map = transport_map(sx, sxs);
        const Mat push = map.T_star * sxs * map.T_star.transpose() + map.Sigma_w;
        REQUIRE((push - sx).norm() <= 1e-8 * (1.0 + sx.norm()));
        REQUIRE(is_psd(map.Sigma_w, 0.0));
    }
}

TEST_CASE("strictly positive case agrees with the inverse-free textbook form") {
    // For Sigma_x > 0 the map can also be written
    // Sigma_x^{1/2} (Sigma_x^{1/2} Sigma_x* Sigma_x^{1/2})^{1/2} Sigma_x^{-1/2}
    // Sigma_x*^{-1}; both forms must coincide when everything is invertible.
    Philox rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.next_u64() % 4);
        const Mat sx = pkf::test::rand_pd(rng, n);
        const Mat sxs = pkf::test::rand_pd(rng, n);
        const Mat a = sqrt_psd(sx);
        const Mat alt = a * sqrt_psd(symmetrize(a * sxs * a)) * pinv_psd(a) * pinv_psd(sxs);
        const TransportMap map = transport_map(sx, sxs);
        REQUIRE((map.T_star - alt).norm() <= 1e-8 * (1.0 + alt.norm()));
    }
}

TEST_CASE("gelbrich distance closed forms") {
    const Mat s = 2.0 * Mat::Identity(2, 2);
    CHECK(gelbrich_distance(Vec::Zero(2), s, Vec::Zero(2), s) == Catch::Approx(0.0).margin(1e-12));

    Vec mu1(2);
    mu1 << 3.0, 4.0;
    CHECK(gelbrich_distance(mu1, s, Vec::Zero(2), s) == Catch::Approx(5.0));

    // scalar case: |sigma1 - sigma2|
    const Mat s1 = 4.0 * Mat::Identity(1, 1), s2 = 9.0 * Mat::Identity(1, 1);
    CHECK(gelbrich_distance(Vec::Zero(1), s1, Vec::Zero(1), s2) == Catch::Approx(1.0));
}

TEST_CASE("gelbrich distance is symmetric and satisfies the triangle inequality") {
    Philox rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.next_u64() % 4);
        const Mat a = rand_psd(rng, n), b = rand_psd(rng, n), c = rand_psd(rng, n);
        const Vec ma = pkf::test::rand_mat(rng, n, 1), mb = pkf::test::rand_mat(rng, n, 1),
                  mc = pkf::test::rand_mat(rng, n, 1);
        const double ab = gelbrich_distance(ma, a, mb, b);
        const double ba = gelbrich_distance(mb, b, ma, a);
        const double bc = gelbrich_distance(mb, b, mc, c);
        const double ac = gelbrich_distance(ma, a, mc, c);
        REQUIRE(ab == Catch::Approx(ba).margin(1e-10));
        REQUIRE(ac <= ab + bc + 1e-8);
    }
}

TEST_CASE("fit_gaussian moments") {
    std::vector<Vec> same(5, Vec::Ones(3));
    const auto [mu, cov] = fit_gaussian(same);
    CHECK(mu.isApprox(Vec::Ones(3), 1e-14));
    CHECK(cov.norm() <= 1e-14);

    std::vector<Vec> pm{Vec::Zero(2), Vec::Zero(2)};
    pm[0][0] = 1.0;
    pm[1][0] = -1.0;
    const auto [mu2, cov2] = fit_gaussian(pm);
    CHECK(mu2.norm() <= 1e-14);
    Mat want = Mat::Zero(2, 2);
    want(0, 0) = 1.0;  // 1/N normalization
    CHECK(cov2.isApprox(want, 1e-14));

    std::vector<Vec> one{Vec::Zero(2)};
    CHECK_THROWS_AS(fit_gaussian(one), TooFewSamples);
}

TEST_CASE("fit_gaussian is consistent on a large sample") {
    Philox rng(24);
    Mat sigma(2, 2);
    sigma << 2.0, 0.7, 0.7, 1.0;
    const GaussianSampler sampler(sigma);
    const long n = 200000;
    std::vector<Vec> xs(n);
    for (long i = 0; i < n; ++i) xs[i] = sampler.sample(rng);
    const auto [mu, cov] = fit_gaussian(xs);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            const double se =
                std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
            REQUIRE(std::abs(cov(i, j) - sigma(i, j)) <= 4.0 * se);
        }
    CHECK(mu.norm() <= 4.0 * std::sqrt(2.0 / n) * 2.0);
}
