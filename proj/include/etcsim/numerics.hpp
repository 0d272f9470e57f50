#pragma once

// Fixed-step integration and bracketed root localization.

#include "etcsim/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace etcsim {

class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double t, std::string signal)
        : std::runtime_error(what + " (signal '" + signal + "' at t=" + std::to_string(t) + ")"),
          t_(t),
          signal_(std::move(signal)) {}

    double time() const noexcept { return t_; }
    const std::string& signal() const noexcept { return signal_; }

private:
    double t_;
    std::string signal_;
};

/// One classical Runge-Kutta step. `f(t, x)` returns dx/dt.
template <typename Field>
Vec rk4_step(Field&& f, double t, const Vec& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step must be positive");
    const Vec k1 = f(t, x);
    if (!k1.allFinite()) throw NumericalError("non-finite RK4 stage", t, "k1");
    const Vec k2 = f(t + 0.5 * h, (x + 0.5 * h * k1).eval());
    if (!k2.allFinite()) throw NumericalError("non-finite RK4 stage", t + 0.5 * h, "k2");
    const Vec k3 = f(t + 0.5 * h, (x + 0.5 * h * k2).eval());
    if (!k3.allFinite()) throw NumericalError("non-finite RK4 stage", t + 0.5 * h, "k3");
    const Vec k4 = f(t + h, (x + h * k3).eval());
    if (!k4.allFinite()) throw NumericalError("non-finite RK4 stage", t + h, "k4");
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class NoSignChange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bisection for the first t where g(t) >= 0, given g(lo) < 0 <= g(hi).
/// Returns the upper end of the final bracket, so g(result) >= 0 always holds.
template <typename G>
double locate_crossing(G&& g, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("locate_crossing: tolerance must be positive");
    if (!(hi > lo)) throw std::invalid_argument("locate_crossing: empty interval");
    const double glo = g(lo);
    const double ghi = g(hi);
    if (!(glo < 0.0 && ghi >= 0.0)) {
        throw NoSignChange("locate_crossing: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    }
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

} // namespace etcsim
