#pragma once

#include "etcsim/engine.hpp"

namespace etcsim::testing {

// Second-order example: theta = 1, psi = (cos y, y + 1).
inline SimConfig example_config(bool case2 = false) {
    SimConfig c;
    c.model.n = 2;
    c.model.theta_true = 1.0;
    c.model.theta_bar = 1.5;
    c.model.psi = {parse_expr("cos(y)"), parse_expr("y+1")};
    c.model.lipschitz = {1.0, 1.0};
    c.model.psi_bound = {1.0, 1.0};
    c.k = Vec{{5.0, 5.0}};
    c.gains.c = Vec{{8.5, 5.5}};
    c.gains.rho = Vec{{12.0}};
    c.gains.phi = Vec{{10.0}};
    c.gains.varrho = Vec{{0.16}};
    c.gains.delta = 1.0;
    c.gains.sigma = 0.1;
    if (case2) {
        c.thresholds = {0.3, 0.31, 0.5, 0.5, 0.5, 0.5};
    } else {
        c.thresholds = {0.05, 0.051, 0.2, 0.2, 0.2, 0.2};
    }
    c.init.x0 = Vec{{5.0, -5.0}};
    c.init.xi0 = Vec{{0.0, 0.0}};
    c.init.zeta0 = Vec{{0.0, -4.0}};
    c.init.theta_hat0 = 4.0;
    c.init.alpha_f0 = Vec{{0.0}};
    c.t_end = 10.0;
    c.h = 0.01;
    c.q = 50.0;
    c.tail_start = 5.0;
    return c;
}

inline ControllerDesign example_design(const SimConfig& c = example_config()) {
    return ControllerDesign::make(c.k, c.gains, c.thresholds, c.model.psi);
}

inline Latched example_latched() {
    Latched l;
    l.xi = Vec{{0.0, 0.0}};
    l.zeta = Vec{{0.0, -4.0}};
    l.theta_hat = 4.0;
    l.alpha_f = Vec{{0.0}};
    l.ybar = 5.0;
    l.t_j = 0.0;
    return l;
}

} // namespace etcsim::testing
