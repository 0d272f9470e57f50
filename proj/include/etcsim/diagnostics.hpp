#pragma once

// Proof-side signals evaluated on the continuous closed-loop state:
// estimation error, continuous companions of the sampled virtual inputs,
// and the Lyapunov candidate V. These read the true parameter and are
// never fed back into the controller.

#include "etcsim/controller.hpp"
#include "etcsim/linalg.hpp"

#include <vector>

namespace etcsim {

/// eps = x - (xi + theta * zeta).
inline Vec estimation_error(const Vec& x, const Vec& xi, const Vec& zeta, double theta) {
    return x - (xi + theta * zeta);
}

struct Companions {
    Vec alpha_hat;    // alpha_hat_1 .. alpha_hat_{n-1}
    Vec upsilon_hat;  // upsilon_hat_2 .. upsilon_hat_n
};

/// Continuous-time analogues of the virtual inputs:
///   alpha_hat_1 = -c_1 y - theta_hat (psi_1(y) + zeta_2),
///   upsilon_hat_i = alpha_if - alpha_hat_{i-1},
///   alpha_hat_i = -c_i z_i - k_i (y - xi_1) - rho_i upsilon_hat_i.
inline Companions companion_variables(double y, const Vec& xi, const Vec& zeta, double theta_hat, const Vec& alpha_f,
                                      const GainSet& g, const Vec& k, const Expr& psi1) {
    const auto n = xi.size();
    Companions out{Vec(n - 1), Vec(n - 1)};
    if (n < 2) return out;
    out.alpha_hat[0] = -g.c[0] * y - theta_hat * (psi1(y) + zeta[1]);
    out.upsilon_hat[0] = alpha_f[0] - out.alpha_hat[0];
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double z = xi[i] - alpha_f[i - 1];
        out.alpha_hat[i] = -g.c[i] * z - k[i] * (y - xi[0]) - g.rho[i - 1] * out.upsilon_hat[i - 1];
        out.upsilon_hat[i] = alpha_f[i] - out.alpha_hat[i];
    }
    return out;
}

/// Continuous closed-loop quantities needed to evaluate V.
struct FrameInputs {
    Vec x;
    Vec xi;
    Vec zeta;
    double theta_hat = 0.0;
    Vec alpha_f;
};

struct LyapunovBreakdown {
    double V = 0.0;
    std::vector<double> per_step;  // V_1 .. V_n
    double eps_term = 0.0;         // eps' P eps
    double zeta_term = 0.0;        // zeta' P zeta
    Vec z;                         // z_1 = y, z_i = xi_i - alpha_if
    Vec upsilon_hat;
    Vec eps;
    double theta_tilde = 0.0;
};

/// V = sum V_i with V_1 = (z_1^2 + theta_tilde^2 + upsilon_hat_2^2)/2 + eps'P eps + zeta'P zeta,
/// V_i = (z_i^2 + upsilon_hat_{i+1}^2)/2 for 2 <= i <= n-1, V_n = z_n^2/2.
inline LyapunovBreakdown lyapunov_value(const FrameInputs& f, const Mat& P, double theta_true, const GainSet& g,
                                        const Vec& k, const Expr& psi1) {
    const auto n = f.x.size();
    LyapunovBreakdown b;
    b.eps = estimation_error(f.x, f.xi, f.zeta, theta_true);
    b.theta_tilde = theta_true - f.theta_hat;
    b.z = Vec(n);
    b.z[0] = f.x[0];
    for (Eigen::Index i = 1; i < n; ++i) b.z[i] = f.xi[i] - f.alpha_f[i - 1];
    b.upsilon_hat = companion_variables(f.x[0], f.xi, f.zeta, f.theta_hat, f.alpha_f, g, k, psi1).upsilon_hat;
    b.eps_term = b.eps.dot(P * b.eps);
    b.zeta_term = f.zeta.dot(P * f.zeta);

    b.per_step.assign(static_cast<std::size_t>(n), 0.0);
    const double ups2 = n >= 2 ? b.upsilon_hat[0] : 0.0;
    b.per_step[0] = 0.5 * (b.z[0] * b.z[0] + b.theta_tilde * b.theta_tilde + ups2 * ups2) + b.eps_term + b.zeta_term;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        b.per_step[static_cast<std::size_t>(i)] = 0.5 * (b.z[i] * b.z[i] + b.upsilon_hat[i] * b.upsilon_hat[i]);
    }
    if (n >= 2) b.per_step[static_cast<std::size_t>(n - 1)] = 0.5 * b.z[n - 1] * b.z[n - 1];
    for (double v : b.per_step) b.V += v;
    return b;
}

} // namespace etcsim
