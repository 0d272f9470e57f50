#pragma once

// True system in output-feedback form,
//
//   x_i' = x_{i+1} + theta * psi_i(x_1),  i < n
//   x_n' = u       + theta * psi_n(x_1),  y = x_1,
//
// together with the plant-side zero-order hold of y and its event detector
// (ED1): transmit y whenever |y(t) - y(tbar_k)| >= gamma_y.

#include "etcsim/events.hpp"
#include "etcsim/expr.hpp"
#include "etcsim/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

struct PlantModel {
    int n = 2;
    double theta_true = 0.0;
    double theta_bar = 0.0;
    std::vector<Expr> psi;
    std::vector<double> lipschitz;  // L_i
    std::vector<double> psi_bound;  // Psi_i, bound on |psi_i'|

    /// L = sqrt(sum L_i^2).
    double lipschitz_norm() const {
        double s = 0.0;
        for (double l : lipschitz) s += l * l;
        return std::sqrt(s);
    }

    /// ||psi(0)||.
    double psi_at_zero_norm() const {
        double s = 0.0;
        for (const auto& p : psi) {
            const double v = p(0.0);
            s += v * v;
        }
        return std::sqrt(s);
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("plant order n must be at least 1");
        const auto un = static_cast<std::size_t>(n);
        if (psi.size() != un) throw std::invalid_argument("plant needs exactly n nonlinearities psi");
        if (lipschitz.size() != un || psi_bound.size() != un) {
            throw std::invalid_argument("plant needs n Lipschitz constants and n derivative bounds");
        }
        for (std::size_t i = 0; i < un; ++i) {
            if (!(lipschitz[i] > 0.0)) throw std::invalid_argument("Lipschitz constant L_" + std::to_string(i + 1) + " must be > 0");
            if (!(psi_bound[i] > 0.0)) throw std::invalid_argument("derivative bound Psi_" + std::to_string(i + 1) + " must be > 0");
        }
        if (!(theta_bar >= 0.0) || !(std::abs(theta_true) <= theta_bar)) {
            throw std::invalid_argument("|theta| <= theta_bar violated");
        }
    }
};

/// psi(y) as a vector.
inline Vec psi_vector(const PlantModel& m, double y) {
    Vec out(m.n);
    for (int i = 0; i < m.n; ++i) out[i] = m.psi[static_cast<std::size_t>(i)](y);
    return out;
}

inline Vec plant_derivative(const Vec& x, double u, const PlantModel& m) {
    const double y = x[0];
    Vec dx(m.n);
    for (int i = 0; i < m.n; ++i) {
        const double drive = (i + 1 < m.n) ? x[i + 1] : u;
        dx[i] = drive + m.theta_true * m.psi[static_cast<std::size_t>(i)](y);
    }
    return dx;
}

struct PlantState {
    double t = 0.0;
    Vec x;
    double y_latched = 0.0;
    double tbar_last = -std::numeric_limits<double>::infinity();
    long ed1_count = 0;

    double y() const { return x[0]; }
};

/// Initial transmission at t = 0. Not counted as an ED1 event.
inline PlantState plant_init(const Vec& x0) {
    PlantState s;
    s.t = 0.0;
    s.x = x0;
    s.y_latched = x0[0];
    s.tbar_last = 0.0;
    return s;
}

/// g = |y - ybar| - gamma_y. ED1 fires when g >= 0.
inline double ed1_condition(double y_now, const PlantState& s, double gamma_y) {
    return std::abs(y_now - s.y_latched) - gamma_y;
}

/// Latches y_star at t_star and returns the event to log.
inline EventRecord ed1_fire(PlantState& s, double t_star, double y_star) {
    if (!(t_star > s.tbar_last)) {
        throw std::logic_error("ED1 fired twice at t=" + std::to_string(t_star));
    }
    EventRecord ev{t_star, Detector::ED1, Condition::e_y, std::abs(y_star - s.y_latched)};
    s.y_latched = y_star;
    s.tbar_last = t_star;
    ++s.ed1_count;
    return ev;
}

} // namespace etcsim
