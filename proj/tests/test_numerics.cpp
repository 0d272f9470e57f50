#include "etcsim/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace etcsim;

TEST(Rk4, ZeroField) {
    const Vec x{{1.5, -2.0}};
    const Vec y = rk4_step([](double, const Vec& v) { return Vec(Vec::Zero(v.size())); }, 0.0, x, 0.3);
    EXPECT_EQ(y, x);
}

TEST(Rk4, Exponential) {
    const Vec y = rk4_step([](double, const Vec& v) { return Vec(-v); }, 0.0, Vec{{1.0}}, 0.1);
    EXPECT_NEAR(y[0], 0.9048375, 1e-7);
    EXPECT_NEAR(y[0], std::exp(-0.1), 1e-7);
}

TEST(Rk4, PureTime) {
    const Vec y = rk4_step([](double, const Vec&) { return Vec{{1.0}}; }, 0.0, Vec{{0.0}}, 0.5);
    EXPECT_DOUBLE_EQ(y[0], 0.5);
}

TEST(Rk4, RejectsBadStep) {
    auto f = [](double, const Vec& v) { return Vec(-v); };
    EXPECT_THROW(rk4_step(f, 0.0, Vec{{1.0}}, 0.0), std::invalid_argument);
    EXPECT_THROW(rk4_step(f, 0.0, Vec{{1.0}}, -0.1), std::invalid_argument);
}

TEST(Rk4, NonFiniteStageThrows) {
    auto f = [](double, const Vec& v) { return Vec(v.array() / 0.0); };
    EXPECT_THROW(rk4_step(f, 0.0, Vec{{1.0}}, 0.1), NumericalError);
}

TEST(Rk4Property, FourthOrder) {
    // x' = -x + sin t, x(0) = 1
    auto f = [](double t, const Vec& v) { return Vec(-v.array() + std::sin(t)); };
    auto exact = [](double t) { return 1.5 * std::exp(-t) + 0.5 * (std::sin(t) - std::cos(t)); };
    auto err = [&](int steps) {
        Vec x{{1.0}};
        const double h = 1.0 / steps;
        for (int i = 0; i < steps; ++i) x = rk4_step(f, i * h, x, h);
        return std::abs(x[0] - exact(1.0));
    };
    for (int steps : {10, 20, 40}) {
        const double ratio = err(steps) / err(2 * steps);
        EXPECT_GT(ratio, 14.0) << steps;
        EXPECT_LT(ratio, 18.0) << steps;
    }
}

TEST(Crossing, Linear) {
    EXPECT_NEAR(locate_crossing([](double t) { return t - 1.0; }, 0.0, 2.0, 1e-9), 1.0, 1e-9);
}

TEST(Crossing, Sqrt2) {
    EXPECT_NEAR(locate_crossing([](double t) { return t * t - 2.0; }, 0.0, 2.0, 1e-9), 1.41421356, 1e-8);
}

TEST(Crossing, NoSignChangeThrows) {
    EXPECT_THROW(locate_crossing([](double) { return -1.0; }, 0.0, 1.0, 1e-9), NoSignChange);
    EXPECT_THROW(locate_crossing([](double) { return 1.0; }, 0.0, 1.0, 1e-9), NoSignChange);
}

TEST(Crossing, ResultIsAtOrPastCrossing) {
    auto g = [](double t) { return std::sin(t) - 0.5; };
    const double t = locate_crossing(g, 0.0, 1.0, 1e-12);
    EXPECT_GE(g(t), 0.0);
    EXPECT_NEAR(t, std::asin(0.5), 1e-12);
}
