#include "etcsim/diagnostics.hpp"
#include "example_setup.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace etcsim;
using etcsim::testing::example_config;

namespace {
Mat example_P() {
    Mat p(2, 2);
    p << 0.6, -0.5, -0.5, 0.62;
    return p;
}
} // namespace

TEST(EstimationError, Examples) {
    const Vec e = estimation_error(Vec{{5.0, -5.0}}, Vec::Zero(2), Vec{{0.0, -4.0}}, 1.0);
    EXPECT_DOUBLE_EQ(e[0], 5.0);
    EXPECT_DOUBLE_EQ(e[1], -1.0);
    EXPECT_EQ(estimation_error(Vec{{1.0, 2.0}}, Vec{{1.0, 2.0}}, Vec::Zero(2), 3.0), Vec(Vec::Zero(2)));
    const Vec x{{1.0, 2.0}}, xi{{0.5, -1.0}};
    EXPECT_EQ(estimation_error(x, xi, Vec{{7.0, 7.0}}, 0.0), Vec(x - xi));
}

TEST(Companions, ExampleInitialFrame) {
    const auto c = example_config();
    const auto comp =
        companion_variables(5.0, Vec::Zero(2), Vec{{0.0, -4.0}}, 4.0, Vec::Zero(1), c.gains, c.k, c.model.psi[0]);
    EXPECT_NEAR(comp.alpha_hat[0], -27.635, 1e-3);
    EXPECT_NEAR(comp.upsilon_hat[0], 27.635, 1e-3);
}

TEST(Companions, ZeroFrame) {
    const auto c = example_config();
    const auto comp =
        companion_variables(0.0, Vec::Zero(2), Vec::Zero(2), 0.0, Vec::Zero(1), c.gains, c.k, c.model.psi[0]);
    EXPECT_EQ(comp.alpha_hat[0], 0.0);
    EXPECT_EQ(comp.upsilon_hat[0], 0.0);
}

TEST(Companions, AgreeWithVirtualInputsWhenUnsampled) {
    GainSet g;
    g.c = Vec{{3.0, 5.0, 4.0}};
    g.rho = Vec{{6.0, 7.0}};
    g.phi = Vec{{1.0, 1.0}};
    g.varrho = Vec{{1.0, 1.0}};
    Latched l;
    l.xi = Vec{{0.5, 1.0, -2.0}};
    l.zeta = Vec{{0.0, 0.25, 0.0}};
    l.alpha_f = Vec{{0.5, 1.5}};
    l.ybar = 1.0;
    l.theta_hat = 2.0;
    const Vec k{{3.0, 3.0, 1.0}};
    const Expr psi1 = parse_expr("cos(y)");
    const Vec alpha = virtual_inputs(l, g, k, psi1);
    const auto comp = companion_variables(l.ybar, l.xi, l.zeta, l.theta_hat, l.alpha_f, g, k, psi1);
    EXPECT_DOUBLE_EQ(comp.alpha_hat[0], alpha[0]);
    EXPECT_DOUBLE_EQ(comp.alpha_hat[1], alpha[1]);
}

TEST(Lyapunov, ZeroState) {
    const auto c = example_config();
    const FrameInputs f{Vec::Zero(2), Vec::Zero(2), Vec::Zero(2), 0.0, Vec::Zero(1)};
    EXPECT_EQ(lyapunov_value(f, example_P(), 0.0, c.gains, c.k, parse_expr("0")).V, 0.0);
}

TEST(Lyapunov, EpsilonQuadraticForm) {
    const auto c = example_config();
    const FrameInputs f{Vec{{1.0, 0.0}}, Vec::Zero(2), Vec::Zero(2), 0.0, Vec::Zero(1)};
    EXPECT_NEAR(lyapunov_value(f, example_P(), 0.0, c.gains, c.k, c.model.psi[0]).eps_term, 0.6, 1e-15);
}

TEST(Lyapunov, ExampleInitialFrame) {
    const auto c = example_config();
    const FrameInputs f{Vec{{5.0, -5.0}}, Vec::Zero(2), Vec{{0.0, -4.0}}, 4.0, Vec::Zero(1)};
    const auto b = lyapunov_value(f, example_P(), 1.0, c.gains, c.k, c.model.psi[0]);
    const double ups = 42.5 + 4.0 * (std::cos(5.0) - 4.0);  // alpha_2f - alpha_hat_1
    const double eps_term = 0.6 * 25.0 - 2.0 * 0.5 * 5.0 * -1.0 + 0.62 * 1.0;
    const double zeta_term = 0.62 * 16.0;
    const double expected = 0.5 * (25.0 + 9.0 + ups * ups) + eps_term + zeta_term;
    EXPECT_NEAR(b.V, expected, 1e-10);
    EXPECT_NEAR(b.eps_term, 20.62, 1e-12);
    EXPECT_NEAR(b.zeta_term, 9.92, 1e-12);
    EXPECT_DOUBLE_EQ(b.theta_tilde, -3.0);
    EXPECT_EQ(b.per_step.size(), 2u);
    EXPECT_EQ(b.per_step[1], 0.0);
}
