#pragma once

// Parameter advisor. Checks a design (k, c, rho, phi, varrho, delta, sigma,
// thresholds) against the gain conditions of the stability argument and
// reports each inequality with its margin (lhs - rhs, so >= 0 means
// satisfied), the recommended adaptive leak delta and the decay rate c(beta).

#include "etcsim/controller.hpp"
#include "etcsim/linalg.hpp"
#include "etcsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

enum class CheckKind {
    Structural,  // relations between design parameters alone
    Recipe       // quantitative conditions that also involve P, L, q
};

struct ConstraintResult {
    std::string name;
    CheckKind kind = CheckKind::Structural;
    bool satisfied = false;
    double margin = 0.0;
    std::string inequality;
};

struct AdvisorInputs {
    PlantModel model;
    Vec k;
    GainSet gains;
    TriggerThresholds thresholds;
    double q = 50.0;
    double c_Delta = 0.0;           // slack for the unresolved d(beta) terms
    double c_delta = 2.0;           // must exceed 1
    std::optional<double> c0;       // target for c_bar_i; defaults to d_bar / q
};

struct AdvisorReport {
    bool A_c_hurwitz = false;
    LyapunovCert P;
    std::vector<ConstraintResult> constraints;
    double suggested_delta = 0.0;
    std::vector<double> c_lower_bounds;  // minimal c_i given the c_bar targets
    std::vector<double> c_bar;           // realised c_bar_i of the supplied gains
    double c0 = 0.0;
    double c_of_beta = 0.0;
    double delta_bar = 0.0;
    double sigma_bar = 0.0;
    double lambda_bar = 0.0;
    double eta0 = 0.0, eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
    double eta_floor = 0.0;  // eta_underbar(c_Delta)
    double q_floor = 0.0;    // eta_underbar(0)

    const ConstraintResult* find(const std::string& name) const {
        for (const auto& c : constraints) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }

    bool all_structural_pass() const {
        return std::all_of(constraints.begin(), constraints.end(),
                           [](const auto& c) { return c.kind == CheckKind::Recipe || c.satisfied; });
    }
    bool all_pass() const {
        return std::all_of(constraints.begin(), constraints.end(), [](const auto& c) { return c.satisfied; });
    }
};

class AdvisorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {
struct EtaTerms {
    double eta0, eta1, eta2, eta3, floor;
};

inline EtaTerms eta_terms(double c_Delta, double P_norm, double psi0, double sigma, double sigma_bar,
                          double lambda_bar, double theta_bar, double gty, double c_delta) {
    EtaTerms e{};
    const double tb2 = theta_bar * theta_bar;
    e.eta0 = 2.0 * P_norm * P_norm * psi0 * psi0 / sigma + c_Delta;
    e.eta1 = 2.0 * sigma_bar / lambda_bar;
    e.eta2 = (2.0 * e.eta0 * sigma + c_delta * tb2 * (1.0 + gty * gty) + e.eta1 * tb2 * sigma / 2.0) / sigma;
    e.eta3 = (c_delta - 1.0) * e.eta0 * tb2;
    e.floor = (e.eta2 + std::sqrt(e.eta2 * e.eta2 + 4.0 * e.eta1 * e.eta3)) / (2.0 * e.eta1);
    return e;
}
} // namespace detail

inline AdvisorReport advise_parameters(const AdvisorInputs& in) {
    const int n = in.model.n;
    const GainSet& g = in.gains;
    const TriggerThresholds& thr = in.thresholds;
    if (n < 2) throw AdvisorError("advisor: n >= 2 required");
    if (in.k.size() != n || g.c.size() != n || g.rho.size() != n - 1 || g.phi.size() != n - 1 ||
        g.varrho.size() != n - 1) {
        throw AdvisorError("advisor: gain dimensions inconsistent with n");
    }
    if (!(g.sigma > 0.0 && g.sigma < 0.2)) throw AdvisorError("advisor: sigma must lie in (0, 1/5)");
    if (!(in.q > 0.0)) throw AdvisorError("advisor: q must be > 0");
    const double theta_bar = in.model.theta_bar;
    if (2.0 * in.q <= theta_bar * theta_bar) throw AdvisorError("advisor: 2q <= theta_bar^2, delta formula undefined");
    if (!(in.c_delta > 1.0)) throw AdvisorError("advisor: c_delta must exceed 1");
    if (!(in.c_Delta >= 0.0)) throw AdvisorError("advisor: c_Delta must be >= 0");

    AdvisorReport r;
    const Mat A_c = build_companion(in.k);
    r.A_c_hurwitz = is_hurwitz(A_c);
    if (!r.A_c_hurwitz) throw AdvisorError("advisor: A_c built from k is not Hurwitz");
    r.P = solve_lyapunov(A_c);

    const double sigma = g.sigma;
    const double L = in.model.lipschitz_norm();
    const double psi0 = in.model.psi_at_zero_norm();
    const double P_norm = r.P.norm();
    const double gty = thr.gamma_y_tilde();
    r.sigma_bar = 1.0 - 5.0 * sigma;
    r.lambda_bar = r.P.lambda_max;

    const auto add = [&](std::string name, CheckKind kind, double margin, std::string ineq) {
        r.constraints.push_back({std::move(name), kind, margin >= 0.0, margin, std::move(ineq)});
    };

    {
        Eigen::EigenSolver<Mat> es(A_c, false);
        double worst = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) worst = std::max(worst, es.eigenvalues()[i].real());
        add("hurwitz", CheckKind::Structural, -worst, "max Re eig(A_c) < 0");
    }
    add("sigma_range", CheckKind::Structural, std::min(sigma, 0.2 - sigma), "0 < sigma < 1/5");
    // strict inequality; a tie counts as failing
    add("gamma_order", CheckKind::Structural, thr.gamma_ybar - thr.gamma_y, "gamma_ybar > gamma_y");
    if (!(thr.gamma_ybar > thr.gamma_y)) r.constraints.back().satisfied = false;

    for (int i = 0; i + 1 < n; ++i) {
        const auto idx = std::to_string(i + 2);
        add("rho_" + idx + "_proof", CheckKind::Structural, g.rho[i] - (2.0 + g.phi[i] + g.varrho[i]),
            "rho_" + idx + " >= 2 + phi_" + idx + " + varrho_" + idx);
        add("rho_" + idx + "_example", CheckKind::Structural, g.rho[i] - (1.5 + g.phi[i] + g.varrho[i]),
            "rho_" + idx + " >= 3/2 + phi_" + idx + " + varrho_" + idx);
    }

    // Recipe quantities with the configured delta.
    const auto eta = detail::eta_terms(in.c_Delta, P_norm, psi0, sigma, r.sigma_bar, r.lambda_bar, theta_bar, gty,
                                       in.c_delta);
    r.eta0 = eta.eta0;
    r.eta1 = eta.eta1;
    r.eta2 = eta.eta2;
    r.eta3 = eta.eta3;
    r.eta_floor = eta.floor;
    r.q_floor =
        detail::eta_terms(0.0, P_norm, psi0, sigma, r.sigma_bar, r.lambda_bar, theta_bar, gty, in.c_delta).floor;
    const double d_bar = g.delta * theta_bar * theta_bar / 2.0 + r.eta0;
    r.c0 = in.c0.value_or(d_bar / in.q);
    r.suggested_delta = 2.0 * in.c_delta / (2.0 * in.q - theta_bar * theta_bar) * (r.eta0 + (1.0 + gty * gty) * in.q / sigma);

    // c_1 floor: 1 + 1/(4 sigma) + 30 sigma L^2 gty^2 + 5 sigma gamma_zeta^2 + ||P||^2 L^2 / sigma
    const double c1_floor = 1.0 + 1.0 / (4.0 * sigma) + 30.0 * sigma * L * L * gty * gty +
                            5.0 * sigma * thr.gamma_zeta * thr.gamma_zeta + P_norm * P_norm * L * L / sigma;
    r.c_lower_bounds.assign(static_cast<std::size_t>(n), 0.0);
    r.c_bar.assign(static_cast<std::size_t>(n), 0.0);
    r.c_lower_bounds[0] = c1_floor + r.c0;
    r.c_bar[0] = g.c[0] - c1_floor;
    add("c_1_bound", CheckKind::Recipe, g.c[0] - r.c_lower_bounds[0],
        "c_1 >= 1 + 1/(4 sigma) + 30 sigma L^2 gty^2 + 5 sigma gamma_zeta^2 + ||P||^2 L^2/sigma + c_bar_1");
    for (int i = 1; i < n; ++i) {
        const auto idx = std::to_string(i + 1);
        const double floor = (i + 1 < n) ? 4.5 : 1.0;
        r.c_lower_bounds[static_cast<std::size_t>(i)] = floor + r.c0;
        r.c_bar[static_cast<std::size_t>(i)] = g.c[i] - floor;
        add("c_" + idx + "_bound", CheckKind::Structural, g.c[i] - r.c_lower_bounds[static_cast<std::size_t>(i)],
            (i + 1 < n ? "c_" + idx + " >= 9/2 + c_bar_" + idx : "c_" + idx + " >= 1 + c_bar_" + idx));
    }

    r.delta_bar = g.delta / 2.0 - (1.0 + gty * gty) / (2.0 * sigma);
    add("delta_bar_positive", CheckKind::Recipe, r.delta_bar, "delta/2 - (1 + gty^2)/(2 sigma) > 0");
    if (!(r.delta_bar > 0.0)) r.constraints.back().satisfied = false;
    add("q_above_eta_floor", CheckKind::Recipe, in.q - r.eta_floor, "q >= eta_underbar(c_Delta)");

    double cb = std::numeric_limits<double>::infinity();
    for (double v : r.c_bar) cb = std::min(cb, 2.0 * v);
    for (Eigen::Index i = 0; i < g.varrho.size(); ++i) cb = std::min(cb, 2.0 * g.varrho[i]);
    cb = std::min(cb, 2.0 * r.delta_bar);
    cb = std::min(cb, r.sigma_bar / r.lambda_bar);
    r.c_of_beta = cb;
    add("c_beta_positive", CheckKind::Recipe, r.c_of_beta, "c(beta) > 0");
    if (!(r.c_of_beta > 0.0)) r.constraints.back().satisfied = false;
    return r;
}

} // namespace etcsim
