#pragma once

// Controller side of the loop: state observer (xi, zeta), adaptive law for
// theta_hat, first-order dynamic filters alpha_f, backstepping virtual inputs
// and the stabilising control, all driven by values sampled at the last
// controller event t_j. Between events every controller state is affine in
// time, so the next self-trigger instant (ED2 deadline) has a closed form.
//
// Index convention: vectors over i = 2..n (rho, phi, varrho, alpha_f) are
// stored 0-based, so element 0 belongs to i = 2. Virtual inputs
// alpha_1..alpha_{n-1} are stored with element 0 = alpha_1.

#include "etcsim/events.hpp"
#include "etcsim/expr.hpp"
#include "etcsim/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace etcsim {

/// Load-time floor in rho_i >= floor + phi_i + varrho_i. The parameter
/// advisor additionally reports the stricter floor of 2.
inline constexpr double kFilterGainFloor = 1.5;

struct GainSet {
    Vec c;       // c_1..c_n
    Vec rho;     // rho_2..rho_n
    Vec phi;     // phi_2..phi_n
    Vec varrho;  // varrho_2..varrho_n
    double delta = 1.0;
    double sigma = 0.1;

    void validate(int n) const {
        const auto m = static_cast<Eigen::Index>(n);
        if (c.size() != m) throw std::invalid_argument("gains: c must have n entries");
        if (rho.size() != m - 1 || phi.size() != m - 1 || varrho.size() != m - 1) {
            throw std::invalid_argument("gains: rho, phi and varrho must have n-1 entries");
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!(c[i] > 0.0)) throw std::invalid_argument("gains: c_" + std::to_string(i + 1) + " must be > 0");
        }
        for (Eigen::Index i = 0; i + 1 < m; ++i) {
            const auto idx = std::to_string(i + 2);
            if (!(rho[i] > 0.0) || !(phi[i] > 0.0) || !(varrho[i] > 0.0)) {
                throw std::invalid_argument("gains: rho_" + idx + ", phi_" + idx + ", varrho_" + idx + " must be > 0");
            }
            if (rho[i] < kFilterGainFloor + phi[i] + varrho[i]) {
                throw std::invalid_argument("gains: rho_" + idx + " >= 3/2 + phi_" + idx + " + varrho_" + idx + " violated");
            }
        }
        if (!(delta > 0.0)) throw std::invalid_argument("gains: delta must be > 0");
        if (!(sigma > 0.0 && sigma < 0.2)) throw std::invalid_argument("gains: sigma must lie in (0, 1/5)");
    }
};

struct TriggerThresholds {
    double gamma_y = 0.05;
    double gamma_ybar = 0.051;
    double gamma_xi = 0.2;
    double gamma_zeta = 0.2;
    double gamma_h = 0.2;
    double gamma_f = 0.2;

    /// Bound on |y(t) - ybar(t_j)|.
    double gamma_y_tilde() const { return gamma_y + gamma_ybar; }

    void validate() const {
        for (double g : {gamma_y, gamma_ybar, gamma_xi, gamma_zeta, gamma_h, gamma_f}) {
            if (!(g > 0.0)) throw std::invalid_argument("thresholds: every gamma must be > 0");
        }
        if (!(gamma_ybar > gamma_y)) throw std::invalid_argument("thresholds: gamma_ybar > gamma_y violated");
    }
};

/// Controller quantities frozen at t_j.
struct Latched {
    Vec xi;
    Vec zeta;
    double theta_hat = 0.0;
    Vec alpha_f;
    double ybar = 0.0;
    double t_j = 0.0;
};

/// Right-hand sides of the controller dynamics, constant on [t_j, t_{j+1}).
struct ControllerDerivs {
    Vec xi_dot;
    Vec zeta_dot;
    double theta_hat_dot = 0.0;
    Vec alpha_f_dot;
};

/// Static controller design: observer gains, backstepping gains, thresholds
/// and the known nonlinearities. Never holds the true parameter.
struct ControllerDesign {
    Vec k;
    Mat A_c;
    GainSet gains;
    TriggerThresholds thresholds;
    std::vector<Expr> psi;

    int n() const { return static_cast<int>(k.size()); }

    static ControllerDesign make(Vec k, GainSet gains, TriggerThresholds thr, std::vector<Expr> psi) {
        ControllerDesign d;
        d.A_c = build_companion(k);
        d.k = std::move(k);
        d.gains = std::move(gains);
        d.thresholds = thr;
        d.psi = std::move(psi);
        return d;
    }
};

/// xi' = A_c xi(t_j) + k ybar(t_j) + b u,  zeta' = A_c zeta(t_j) + psi(ybar(t_j)).
inline std::pair<Vec, Vec> observer_derivatives(const Latched& l, double u, const Mat& A_c, const Vec& k,
                                                const std::vector<Expr>& psi) {
    Vec xi_dot = A_c * l.xi + k * l.ybar;
    xi_dot[xi_dot.size() - 1] += u;
    Vec psi_y(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) psi_y[static_cast<Eigen::Index>(i)] = psi[i](l.ybar);
    Vec zeta_dot = A_c * l.zeta + psi_y;
    return {std::move(xi_dot), std::move(zeta_dot)};
}

/// theta_hat' = ybar(t_j) [psi_1(ybar(t_j)) + zeta_2(t_j)] - delta theta_hat(t_j).
inline double adaptive_derivative(const Latched& l, double delta, const Expr& psi1) {
    const double zeta2 = l.zeta.size() > 1 ? l.zeta[1] : 0.0;
    return l.ybar * (psi1(l.ybar) + zeta2) - delta * l.theta_hat;
}

/// alpha_1 .. alpha_{n-1} evaluated on the latched tuple.
inline Vec virtual_inputs(const Latched& l, const GainSet& g, const Vec& k, const Expr& psi1) {
    const auto n = l.xi.size();
    Vec alpha(std::max<Eigen::Index>(n - 1, 0));
    if (n < 2) return alpha;
    const double zeta2 = l.zeta[1];
    alpha[0] = -g.c[0] * l.ybar - l.theta_hat * (psi1(l.ybar) + zeta2);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        // step i+1 in 1-based numbering
        const double z = l.xi[i] - l.alpha_f[i - 1];
        const double upsilon = l.alpha_f[i - 1] - alpha[i - 1];
        alpha[i] = -g.c[i] * z - k[i] * (l.ybar - l.xi[0]) - g.rho[i - 1] * upsilon;
    }
    return alpha;
}

/// alpha_if' = rho_i (alpha_{i-1}(t_j) - alpha_if(t_j)),  i = 2..n.
inline Vec filter_derivative(const Latched& l, const Vec& rho, const Vec& alpha) {
    Vec d(l.alpha_f.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = rho[i] * (-l.alpha_f[i] + alpha[i]);
    return d;
}

/// u = -c_n z_n(t_j) - k_n (ybar(t_j) - xi_1(t_j)) - rho_n upsilon_n(t_j).
inline double control_law(const Latched& l, const GainSet& g, double k_n, const Vec& alpha) {
    const auto n = l.xi.size();
    if (n < 2) throw std::invalid_argument("control_law requires n >= 2");
    const double z_n = l.xi[n - 1] - l.alpha_f[n - 2];
    const double upsilon_n = l.alpha_f[n - 2] - alpha[n - 2];
    return -g.c[n - 1] * z_n - k_n * (l.ybar - l.xi[0]) - g.rho[n - 2] * upsilon_n;
}

struct Deadline {
    double t = std::numeric_limits<double>::infinity();
    Condition cause = Condition::e_xi;
};

namespace detail {
inline void consider(Deadline& best, double t_j, double gamma, double rate, Condition c) {
    if (rate == 0.0) return;
    const double t = t_j + gamma / rate;
    if (t < best.t) best = {t, c};
}
} // namespace detail

/// Earliest instant at which one of e_xi, e_zeta, e_h, e_f reaches its
/// threshold under the current affine evolution. A zero rate contributes +inf.
inline Deadline compute_deadline(const Latched& l, const ControllerDerivs& d, const TriggerThresholds& thr) {
    Deadline best;
    detail::consider(best, l.t_j, thr.gamma_xi, d.xi_dot.norm(), Condition::e_xi);
    detail::consider(best, l.t_j, thr.gamma_zeta, d.zeta_dot.norm(), Condition::e_zeta);
    detail::consider(best, l.t_j, thr.gamma_h, std::abs(d.theta_hat_dot), Condition::e_h);
    detail::consider(best, l.t_j, thr.gamma_f, d.alpha_f_dot.norm(), Condition::e_f);
    return best;
}

struct ControllerInit {
    Vec xi0;
    Vec zeta0;
    double theta_hat0 = 0.0;
    Vec alpha_f0;
};

struct ControllerState {
    Latched latched;
    ControllerDerivs derivs;
    Vec alpha;  // virtual inputs at t_j
    double u_held = 0.0;
    Deadline deadline;
    long ed2_count = 0;

    Vec xi_at(double t) const { return latched.xi + derivs.xi_dot * (t - latched.t_j); }
    Vec zeta_at(double t) const { return latched.zeta + derivs.zeta_dot * (t - latched.t_j); }
    double theta_hat_at(double t) const { return latched.theta_hat + derivs.theta_hat_dot * (t - latched.t_j); }
    Vec alpha_f_at(double t) const { return latched.alpha_f + derivs.alpha_f_dot * (t - latched.t_j); }

    /// Current sampling errors e_xi, e_zeta, e_h, e_f at time t.
    double sampling_error(Condition c, double t) const {
        const double dt = t - latched.t_j;
        switch (c) {
        case Condition::e_xi: return (derivs.xi_dot * dt).norm();
        case Condition::e_zeta: return (derivs.zeta_dot * dt).norm();
        case Condition::e_h: return std::abs(derivs.theta_hat_dot * dt);
        case Condition::e_f: return (derivs.alpha_f_dot * dt).norm();
        default: return 0.0;
        }
    }
};

namespace detail {
inline void resample(ControllerState& s, const ControllerDesign& d) {
    const GainSet& g = d.gains;
    s.alpha = virtual_inputs(s.latched, g, d.k, d.psi[0]);
    s.u_held = control_law(s.latched, g, d.k[d.k.size() - 1], s.alpha);
    if (!std::isfinite(s.u_held)) {
        throw std::runtime_error("non-finite control at t=" + std::to_string(s.latched.t_j));
    }
    auto [xi_dot, zeta_dot] = observer_derivatives(s.latched, s.u_held, d.A_c, d.k, d.psi);
    s.derivs.xi_dot = std::move(xi_dot);
    s.derivs.zeta_dot = std::move(zeta_dot);
    s.derivs.theta_hat_dot = adaptive_derivative(s.latched, g.delta, d.psi[0]);
    s.derivs.alpha_f_dot = filter_derivative(s.latched, g.rho, s.alpha);
    s.deadline = compute_deadline(s.latched, s.derivs, d.thresholds);
}
} // namespace detail

/// Latches the initial conditions and the first received output at t = 0.
/// This sample is not counted as an ED2 event.
inline ControllerState controller_init(const ControllerDesign& d, const ControllerInit& init, double ybar0) {
    ControllerState s;
    s.latched.xi = init.xi0;
    s.latched.zeta = init.zeta0;
    s.latched.theta_hat = init.theta_hat0;
    s.latched.alpha_f = init.alpha_f0;
    s.latched.ybar = ybar0;
    s.latched.t_j = 0.0;
    detail::resample(s, d);
    return s;
}

/// Arrival check of ED2: |ybar_new - ybar(t_j)| >= gamma_ybar.
inline bool ed2_on_arrival(const ControllerState& s, double ybar_new, double gamma_ybar) {
    return std::abs(ybar_new - s.latched.ybar) >= gamma_ybar;
}

/// Advances every controller state to t_star along its affine law, latches
/// it together with the current received output, and recomputes the control,
/// the derivatives and the next deadline.
inline EventRecord ed2_fire(ControllerState& s, const ControllerDesign& d, double t_star, double ybar_now,
                            Condition cause) {
    if (t_star < s.latched.t_j) throw std::logic_error("ED2 fired before the last sample");
    const double value = cause == Condition::e_ybar ? std::abs(ybar_now - s.latched.ybar)
                                                    : s.sampling_error(cause, t_star);
    Latched next;
    next.xi = s.xi_at(t_star);
    next.zeta = s.zeta_at(t_star);
    next.theta_hat = s.theta_hat_at(t_star);
    next.alpha_f = s.alpha_f_at(t_star);
    next.ybar = ybar_now;
    next.t_j = t_star;
    s.latched = std::move(next);
    detail::resample(s, d);
    ++s.ed2_count;
    return {t_star, Detector::ED2, cause, value};
}

} // namespace etcsim
