#pragma once

// Full-state event-triggered adaptive backstepping used as the comparison
// loop for the second-order example
//
//   x1' = x2 + theta cos(x1),  x2' = u + theta (x1 + 1).
//
// The controller sees the whole state continuously (one plant->controller
// transmission per base step) and resends u = v(t_j) whenever
// |v(t) - v(t_j)| >= gamma_c.

#include "etcsim/engine.hpp"
#include "etcsim/events.hpp"
#include "etcsim/linalg.hpp"
#include "etcsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace etcsim {

struct BaselineConfig {
    double k_fb = 4.0;
    double c_fb = 4.0;
    double gamma_c = 0.06;
    double leak = 1.5;
    double theta_true = 1.0;
    bool excite = true;  // false zeroes both nonlinearities
    double h = 0.01;
    double t_end = 10.0;
    Vec x0 = Vec{{5.0, -5.0}};
    double theta_hat0 = 4.0;
    double tail_start = 5.0;
    double loc_tol = 1e-9;
    long max_events = 1'000'000;

    void validate() const {
        if (!(gamma_c > 0.0)) throw std::invalid_argument("baseline: gamma_c must be > 0");
        if (!(h > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("baseline: h and t_end must be > 0");
        if (x0.size() != 2) throw std::invalid_argument("baseline: x0 must have 2 entries");
        if (!(tail_start < t_end)) throw std::invalid_argument("baseline: tail_start must be < t_end");
    }
};

struct BaselineTerms {
    double alpha1 = 0.0;
    double dalpha_dx1 = 0.0;
    double dalpha_dtheta = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double theta_hat_dot = 0.0;
    double v = 0.0;
};

/// Every intermediate of the comparison control law at (x, theta_hat).
inline BaselineTerms baseline_terms(const Vec& x, double theta_hat, const BaselineConfig& cfg = {}) {
    BaselineTerms b;
    const double x1 = x[0];
    const double x2 = x[1];
    const double c = std::cos(x1);
    b.alpha1 = -cfg.c_fb * x1 - theta_hat * c;
    b.dalpha_dx1 = -cfg.c_fb + theta_hat * std::sin(x1);
    b.dalpha_dtheta = -c;
    b.z1 = x1;
    b.z2 = x2 - b.alpha1;
    b.theta_hat_dot = x1 * c + b.z2 * (x1 + 1.0 - b.dalpha_dx1 * c) - cfg.leak * theta_hat;
    b.v = -cfg.k_fb * b.z2 - b.z1 + b.dalpha_dx1 * x2 - theta_hat * (x1 + 1.0 - b.dalpha_dx1) +
          b.dalpha_dtheta * b.theta_hat_dot;
    return b;
}

inline double baseline_v(const Vec& x, double theta_hat, const BaselineConfig& cfg = {}) {
    return baseline_terms(x, theta_hat, cfg).v;
}

struct BaselineResult {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> u;
    EventLog events;  // one ED2-style record per controller->plant transmission
    long plant_to_controller = 0;
    long controller_to_plant = 0;
    double tail_sup_y = 0.0;
};

namespace detail {

class BaselineLoop {
public:
    explicit BaselineLoop(const BaselineConfig& cfg) : cfg_(cfg) {}

    BaselineResult run() {
        state_ = Vec(3);
        state_ << cfg_.x0[0], cfg_.x0[1], cfg_.theta_hat0;
        v_held_ = v_of(state_);
        record(0.0);

        const auto steps = static_cast<long>(std::ceil(cfg_.t_end / cfg_.h - 1e-9));
        double t = 0.0;
        for (long i = 0; i < steps; ++i) {
            const double t_grid = std::min(static_cast<double>(i + 1) * cfg_.h, cfg_.t_end);
            ++out_.plant_to_controller;
            while (t < t_grid) {
                const double t0 = t;
                const Vec s0 = state_;
                const Vec s_end = integrate(t0, s0, t_grid - t0);
                if (!s_end.allFinite()) throw NumericalError("non-finite baseline state", t_grid, "x");
                auto g = [&](double tau) {
                    const Vec s = tau <= t0 ? s0 : (tau == t_grid ? s_end : integrate(t0, s0, tau - t0));
                    return std::abs(v_of(s) - v_held_) - cfg_.gamma_c;
                };
                if (g(t_grid) < 0.0) {
                    state_ = s_end;
                    t = t_grid;
                    break;
                }
                const double t_ev = locate_crossing(g, t0, t_grid, cfg_.loc_tol);
                state_ = t_ev == t_grid ? s_end : integrate(t0, s0, t_ev - t0);
                t = t_ev;
                record(t);
                const double v_now = v_of(state_);
                out_.events.push_back({t, Detector::ED2, Condition::e_ybar, std::abs(v_now - v_held_)});
                if (static_cast<long>(out_.events.size()) > cfg_.max_events) {
                    throw EventStorm("baseline event storm at t=" + std::to_string(t));
                }
                v_held_ = v_now;
                ++out_.controller_to_plant;
                record(t);
            }
            record(t);
        }
        for (std::size_t i = 0; i < out_.t.size(); ++i) {
            if (out_.t[i] >= cfg_.tail_start) out_.tail_sup_y = std::max(out_.tail_sup_y, std::abs(out_.y[i]));
        }
        return std::move(out_);
    }

private:
    double v_of(const Vec& s) const { return baseline_v(s.head<2>(), s[2], cfg_); }

    Vec rhs(const Vec& s) const {
        const double x1 = s[0];
        const double th = cfg_.theta_true;
        const double psi1 = cfg_.excite ? std::cos(x1) : 0.0;
        const double psi2 = cfg_.excite ? x1 + 1.0 : 0.0;
        Vec d(3);
        d[0] = s[1] + th * psi1;
        d[1] = v_held_ + th * psi2;
        d[2] = baseline_terms(s.head<2>(), s[2], cfg_).theta_hat_dot;
        return d;
    }

    Vec integrate(double t0, const Vec& s0, double dt) const {
        return rk4_step([&](double, const Vec& s) { return rhs(s); }, t0, s0, dt);
    }

    void record(double t) {
        out_.t.push_back(t);
        out_.y.push_back(state_[0]);
        out_.u.push_back(v_held_);
    }

    const BaselineConfig& cfg_;
    Vec state_;
    double v_held_ = 0.0;
    BaselineResult out_;
};

} // namespace detail

inline BaselineResult run_baseline(const BaselineConfig& cfg) {
    cfg.validate();
    return detail::BaselineLoop(cfg).run();
}

} // namespace etcsim
