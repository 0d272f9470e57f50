#include "etcsim/plant.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace etcsim;

namespace {

PlantModel example_model(double theta = 1.0) {
    PlantModel m;
    m.n = 2;
    m.theta_true = theta;
    m.theta_bar = 1.5;
    m.psi = {parse_expr("cos(y)"), parse_expr("y+1")};
    m.lipschitz = {1.0, 1.0};
    m.psi_bound = {1.0, 1.0};
    return m;
}

} // namespace

TEST(PlantDerivative, ExampleInitialState) {
    const Vec d = plant_derivative(Vec{{5.0, -5.0}}, 0.0, example_model());
    EXPECT_NEAR(d[0], -4.7163378, 1e-7);
    EXPECT_NEAR(d[0], -5.0 + std::cos(5.0), 1e-15);
    EXPECT_DOUBLE_EQ(d[1], 6.0);
}

TEST(PlantDerivative, UnforcedOrigin) {
    const Vec d = plant_derivative(Vec::Zero(2), 0.0, example_model(0.0));
    EXPECT_EQ(d, Vec(Vec::Zero(2)));
}

TEST(PlantDerivative, UnitInput) {
    const Vec d = plant_derivative(Vec::Zero(2), 1.0, example_model());
    EXPECT_DOUBLE_EQ(d[0], 1.0);
    EXPECT_DOUBLE_EQ(d[1], 2.0);
}

TEST(PlantModel, Norms) {
    const auto m = example_model();
    EXPECT_NEAR(m.lipschitz_norm(), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(m.psi_at_zero_norm(), std::sqrt(2.0), 1e-15);
}

TEST(PlantModel, Validation) {
    auto m = example_model();
    EXPECT_NO_THROW(m.validate());
    m.theta_true = 2.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = example_model();
    m.psi.pop_back();
    EXPECT_THROW(m.validate(), std::invalid_argument);
    m = example_model();
    m.lipschitz[0] = 0.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Ed1, Condition) {
    const PlantState s = plant_init(Vec{{5.0, 0.0}});
    EXPECT_NEAR(ed1_condition(5.06, s, 0.05), 0.01, 1e-12);
    EXPECT_DOUBLE_EQ(ed1_condition(5.0, s, 0.05), -0.05);
    EXPECT_NEAR(ed1_condition(4.95, s, 0.05), 0.0, 1e-15);
}

TEST(Ed1, BoundaryFires) {
    PlantState s = plant_init(Vec{{0.5, 0.0}});
    // exactly representable values so the boundary is hit exactly
    EXPECT_GE(ed1_condition(0.75, s, 0.25), 0.0);
    EXPECT_EQ(ed1_condition(0.75, s, 0.25), 0.0);
}

TEST(Ed1, FireLatches) {
    PlantState s = plant_init(Vec{{5.0, 0.0}});
    EXPECT_EQ(s.ed1_count, 0);
    const auto ev = ed1_fire(s, 0.02, 5.05);
    EXPECT_DOUBLE_EQ(s.y_latched, 5.05);
    EXPECT_EQ(s.ed1_count, 1);
    EXPECT_EQ(ev.detector, Detector::ED1);
    EXPECT_EQ(ev.condition, Condition::e_y);
    EXPECT_NEAR(ev.value, 0.05, 1e-12);
    EXPECT_DOUBLE_EQ(ev.t, 0.02);
}

TEST(Ed1, TwoFiresAtSameTimeRejected) {
    PlantState s = plant_init(Vec{{5.0, 0.0}});
    ed1_fire(s, 0.5, 5.1);
    EXPECT_THROW(ed1_fire(s, 0.5, 5.2), std::logic_error);
    EXPECT_THROW(ed1_fire(s, 0.4, 5.2), std::logic_error);
}
