#include "etcsim/linalg.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace etcsim;

TEST(Companion, Examples) {
    Mat a(2, 2);
    a << -5, 1, -5, 0;
    EXPECT_TRUE(build_companion(Vec{{5.0, 5.0}}).isApprox(a));

    EXPECT_EQ(build_companion(Vec{{1.0}})(0, 0), -1.0);

    Mat b(3, 3);
    b << -1, 1, 0, -2, 0, 1, -3, 0, 0;
    EXPECT_TRUE(build_companion(Vec{{1.0, 2.0, 3.0}}).isApprox(b));
}

TEST(Hurwitz, Examples) {
    Mat a(2, 2);
    a << -5, 1, -5, 0;
    EXPECT_TRUE(is_hurwitz(a));
    Mat z(2, 2);
    z << 0, 1, 0, 0;
    EXPECT_FALSE(is_hurwitz(z));
    EXPECT_TRUE(is_hurwitz(Mat::Constant(1, 1, -1.0)));
    EXPECT_FALSE(is_hurwitz(build_companion(Vec{{-1.0, 2.0}})));
}

TEST(Lyapunov, ExampleObserver) {
    const auto cert = solve_lyapunov(build_companion(Vec{{5.0, 5.0}}));
    Mat expected(2, 2);
    expected << 0.6, -0.5, -0.5, 0.62;
    EXPECT_LE((cert.P - expected).norm(), 1e-12);
    EXPECT_NEAR(cert.lambda_min, 0.1099, 1e-3);
    EXPECT_LE(cert.residual_norm, 1e-9);
}

TEST(Lyapunov, ScalarAndDiagonal) {
    EXPECT_NEAR(solve_lyapunov(Mat::Constant(1, 1, -1.0)).P(0, 0), 0.5, 1e-15);
    const auto d = solve_lyapunov(-2.0 * Mat::Identity(2, 2));
    EXPECT_LE((d.P - 0.25 * Mat::Identity(2, 2)).norm(), 1e-15);
}

TEST(Lyapunov, RejectsNonHurwitz) {
    Mat z(2, 2);
    z << 0, 1, 0, 0;
    EXPECT_THROW(solve_lyapunov(z), LinalgError);
    EXPECT_THROW(solve_lyapunov(Mat::Identity(2, 2)), LinalgError);
}

TEST(LyapunovProperty, RandomHurwitzResidual) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> dim(1, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        Mat b(n, n), s(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                b(i, j) = nd(rng);
                s(i, j) = nd(rng);
            }
        }
        // negative definite symmetric part plus a skew part
        const Mat a = -(b * b.transpose() + 0.1 * Mat::Identity(n, n)) + (s - s.transpose());
        ASSERT_TRUE(is_hurwitz(a));
        const auto cert = solve_lyapunov(a);
        const Mat r = cert.P * a + a.transpose() * cert.P + Mat::Identity(n, n);
        EXPECT_LE(r.norm(), 1e-9) << "trial " << trial;
        EXPECT_GT(cert.lambda_min, 0.0);
        EXPECT_LE((cert.P - cert.P.transpose()).norm(), 0.0);
    }
}

TEST(LyapunovProperty, RandomObserverGains) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> root(0.5, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        // k from a polynomial with negative real roots
        const int n = 2 + trial % 4;
        Vec poly = Vec::Zero(n + 1);
        poly[0] = 1.0;
        for (int r = 0; r < n; ++r) {
            const double p = root(rng);
            for (int i = r + 1; i >= 1; --i) poly[i] += p * poly[i - 1];
        }
        const Mat a = build_companion(poly.tail(n));
        ASSERT_TRUE(is_hurwitz(a));
        const auto cert = solve_lyapunov(a);
        EXPECT_LE(cert.residual_norm, 1e-9);
    }
}
