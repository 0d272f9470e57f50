#include "etcsim/baseline.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace etcsim;

TEST(BaselineV, Origin) {
    const auto b = baseline_terms(Vec::Zero(2), 0.0);
    EXPECT_EQ(b.alpha1, 0.0);
    EXPECT_EQ(b.z2, 0.0);
    EXPECT_EQ(b.theta_hat_dot, 0.0);
    EXPECT_EQ(b.v, 0.0);
}

TEST(BaselineV, ExampleInitialState) {
    const auto b = baseline_terms(Vec{{5.0, -5.0}}, 4.0);
    EXPECT_NEAR(b.alpha1, -21.134648741852907, 1e-12);
    EXPECT_NEAR(b.theta_hat_dot, 128.0885413383207, 1e-10);
    EXPECT_NEAR(b.v, -122.03677343758392, 1e-10);
}

TEST(BaselineV, ContinuousInEstimate) {
    const Vec x{{0.3, -0.2}};
    for (double th = 0.0; th < 50.0; th += 0.5) {
        EXPECT_LT(std::abs(baseline_v(x, th + 1e-7) - baseline_v(x, th)), 1e-3);
    }
}

TEST(Baseline, CountsPerStep) {
    const auto r = run_baseline({});
    EXPECT_EQ(r.plant_to_controller, 1000);
    BaselineConfig c;
    c.t_end = 1.0;
    c.tail_start = 0.5;
    EXPECT_EQ(run_baseline(c).plant_to_controller, 100);
}

TEST(Baseline, HugeThresholdNeverFires) {
    BaselineConfig c;
    c.gamma_c = 1e12;
    c.t_end = 0.5;
    c.tail_start = 0.25;
    const auto r = run_baseline(c);
    EXPECT_EQ(r.controller_to_plant, 0);
}

TEST(Baseline, EquilibriumNeverFires) {
    BaselineConfig c;
    c.x0 = Vec::Zero(2);
    c.theta_hat0 = 0.0;
    c.theta_true = 0.0;
    c.excite = false;
    const auto r = run_baseline(c);
    EXPECT_EQ(r.controller_to_plant, 0);
    EXPECT_EQ(r.tail_sup_y, 0.0);
}

TEST(Baseline, TriggerInstantsAtThreshold) {
    BaselineConfig c;
    c.t_end = 2.0;
    c.tail_start = 1.0;
    const auto r = run_baseline(c);
    ASSERT_GT(r.controller_to_plant, 0);
    EXPECT_EQ(static_cast<long>(r.events.size()), r.controller_to_plant);
    for (const auto& e : r.events) {
        EXPECT_GE(e.value, c.gamma_c - c.loc_tol);
        EXPECT_LE(e.value, c.gamma_c + 1e-3);
    }
}

TEST(Baseline, Deterministic) {
    const auto a = run_baseline({});
    const auto b = run_baseline({});
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.y, b.y);
}

TEST(Baseline, RejectsBadConfig) {
    BaselineConfig c;
    c.gamma_c = 0.0;
    EXPECT_THROW(run_baseline(c), std::invalid_argument);
}
