#pragma once

// Closed-loop hybrid simulation. The plant is integrated with fixed-step RK4
// on a grid of spacing h; the controller is advanced exactly along its affine
// laws. Inside each grid step the earliest of (ED1 crossing, ED2 deadline) is
// localised, the step is truncated there, the event is applied and
// integration restarts from the event instant.

#include "etcsim/controller.hpp"
#include "etcsim/diagnostics.hpp"
#include "etcsim/events.hpp"
#include "etcsim/linalg.hpp"
#include "etcsim/numerics.hpp"
#include "etcsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

struct InitialConditions {
    Vec x0;
    Vec xi0;
    Vec zeta0;
    double theta_hat0 = 0.0;
    Vec alpha_f0;
};

struct SimConfig {
    PlantModel model;
    Vec k;
    GainSet gains;
    TriggerThresholds thresholds;
    InitialConditions init;
    double t_end = 10.0;
    double h = 0.01;
    int record_stride = 1;
    std::optional<double> q;
    std::optional<double> tail_start;  // defaults to t_end / 2
    double loc_tol = 1e-9;
    long max_events = 1'000'000;

    double tail_start_or_default() const { return tail_start.value_or(0.5 * t_end); }

    void validate() const {
        model.validate();
        const int n = model.n;
        if (n < 2) throw std::invalid_argument("config: the controller requires n >= 2");
        const auto m = static_cast<Eigen::Index>(n);
        if (k.size() != m) throw std::invalid_argument("config: observer gain k must have n entries");
        gains.validate(n);
        thresholds.validate();
        if (init.x0.size() != m || init.xi0.size() != m || init.zeta0.size() != m) {
            throw std::invalid_argument("config: x0, xi0 and zeta0 must have n entries");
        }
        if (init.alpha_f0.size() != m - 1) throw std::invalid_argument("config: alpha_f0 must have n-1 entries");
        if (!(h > 0.0)) throw std::invalid_argument("config: step h must be > 0");
        if (!(t_end > 0.0)) throw std::invalid_argument("config: t_end must be > 0");
        if (record_stride < 1) throw std::invalid_argument("config: record_stride must be >= 1");
        if (!(loc_tol > 0.0)) throw std::invalid_argument("config: localisation tolerance must be > 0");
        if (q && !(*q > 0.0)) throw std::invalid_argument("config: q must be > 0");
        if (!(tail_start_or_default() < t_end)) throw std::invalid_argument("config: tail_start must be < t_end");
        if (!is_hurwitz(build_companion(k))) throw std::invalid_argument("config: A_c built from k is not Hurwitz");
    }
};

struct Sample {
    double t = 0.0;
    Vec x;
    double ybar = 0.0;     // plant-side hold y(tbar_k)
    double ybar_tj = 0.0;  // controller's latched ybar(t_j)
    double u = 0.0;
    Vec xi;
    Vec zeta;
    double theta_hat = 0.0;
    Vec alpha_f;
    double eps_norm = 0.0;
    double V = 0.0;

    double y() const { return x[0]; }
};

struct DetectorStats {
    long count = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double mean_gap = std::numeric_limits<double>::infinity();

    friend bool operator==(const DetectorStats&, const DetectorStats&) = default;
};

struct Summary {
    DetectorStats ed1;
    DetectorStats ed2;
    double tail_start = 0.0;
    double tail_sup_y = 0.0;
    double V_max = 0.0;
    double lemma1_max_error = 0.0;

    friend bool operator==(const Summary&, const Summary&) = default;
};

struct SimResult {
    std::vector<Sample> samples;
    EventLog events;
    Summary summary;
};

/// Count and inter-event gap statistics for one detector. Gaps are taken
/// between consecutive logged firings; the t = 0 initialisation is not an event.
inline DetectorStats detector_stats(const EventLog& events, Detector d) {
    DetectorStats s;
    double prev = 0.0;
    double sum = 0.0;
    bool have_prev = false;
    for (const auto& e : events) {
        if (e.detector != d) continue;
        ++s.count;
        if (have_prev) {
            const double gap = e.t - prev;
            s.min_gap = std::min(s.min_gap, gap);
            sum += gap;
        }
        prev = e.t;
        have_prev = true;
    }
    if (s.count >= 2) s.mean_gap = sum / static_cast<double>(s.count - 1);
    return s;
}

inline Summary compute_summary(const std::vector<Sample>& samples, const EventLog& events, double tail_start) {
    Summary s;
    s.ed1 = detector_stats(events, Detector::ED1);
    s.ed2 = detector_stats(events, Detector::ED2);
    s.tail_start = tail_start;
    for (const auto& smp : samples) {
        s.V_max = std::max(s.V_max, smp.V);
        s.lemma1_max_error = std::max(s.lemma1_max_error, std::abs(smp.y() - smp.ybar_tj));
        if (smp.t >= tail_start) s.tail_sup_y = std::max(s.tail_sup_y, std::abs(smp.y()));
    }
    return s;
}

/// Recomputes the summary from the recorded series; throws if it disagrees
/// with the stored one.
inline Summary replay_summary(const SimResult& r) {
    Summary s = compute_summary(r.samples, r.events, r.summary.tail_start);
    if (!(s == r.summary)) throw std::runtime_error("replay_summary: stored summary is inconsistent with the series");
    return s;
}

class EventStorm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

class ClosedLoop {
public:
    explicit ClosedLoop(const SimConfig& cfg)
        : cfg_(cfg),
          design_(ControllerDesign::make(cfg.k, cfg.gains, cfg.thresholds, cfg.model.psi)),
          P_(solve_lyapunov(design_.A_c).P) {}

    SimResult run() {
        plant_ = plant_init(cfg_.init.x0);
        ControllerInit ci{cfg_.init.xi0, cfg_.init.zeta0, cfg_.init.theta_hat0, cfg_.init.alpha_f0};
        ctrl_ = controller_init(design_, ci, plant_.y_latched);
        record();

        const double h = cfg_.h;
        const auto steps = static_cast<long>(std::ceil(cfg_.t_end / h - 1e-9));
        for (long i = 0; i < steps; ++i) {
            const double t_grid = std::min(static_cast<double>(i + 1) * h, cfg_.t_end);
            advance_to(t_grid);
            if ((i + 1) % cfg_.record_stride == 0 || i + 1 == steps) record();
        }
        result_.summary = compute_summary(result_.samples, result_.events, cfg_.tail_start_or_default());
        return std::move(result_);
    }

private:
    Vec integrate(double t0, const Vec& x0, double dt) const {
        const double u = ctrl_.u_held;
        const PlantModel& m = cfg_.model;
        return rk4_step([&](double, const Vec& x) { return plant_derivative(x, u, m); }, t0, x0, dt);
    }

    void advance_to(double t_grid) {
        const double gy = cfg_.thresholds.gamma_y;
        while (plant_.t < t_grid) {
            // a deadline inside the last ED1 bisection bracket leaves the
            // output on or past its threshold
            if (plant_.t > plant_.tbar_last && ed1_condition(plant_.x[0], plant_, gy) >= 0.0) {
                fire_ed1(plant_.t, false);
                record();
            }
            const double t0 = plant_.t;
            const Vec x0 = plant_.x;
            const Vec x_end = integrate(t0, x0, t_grid - t0);
            if (!x_end.allFinite()) throw NumericalError("non-finite plant state", t_grid, "x");

            double t_ed1 = std::numeric_limits<double>::infinity();
            if (ed1_condition(x_end[0], plant_, gy) >= 0.0) {
                auto g = [&](double tau) {
                    if (tau <= t0) return ed1_condition(x0[0], plant_, gy);
                    if (tau == t_grid) return ed1_condition(x_end[0], plant_, gy);
                    return ed1_condition(integrate(t0, x0, tau - t0)[0], plant_, gy);
                };
                t_ed1 = locate_crossing(g, t0, t_grid, cfg_.loc_tol);
            }
            const double t_dl = ctrl_.deadline.t;
            const double t_ev = std::min(t_ed1, t_dl);
            if (t_ev > t_grid) {
                plant_.x = x_end;
                plant_.t = t_grid;
                break;
            }

            plant_.x = (t_ev == t_grid) ? x_end : integrate(t0, x0, t_ev - t0);
            plant_.t = t_ev;
            record();  // state just before the event

            if (t_ed1 <= t_dl) {
                fire_ed1(t_ev, t_dl == t_ev);
            } else {
                log(ed2_fire(ctrl_, design_, t_ev, plant_.y_latched, ctrl_.deadline.cause));
            }
            record();  // state just after the event
        }
    }

    /// ED1 at t, then the arrival check of ED2, then a coinciding deadline.
    void fire_ed1(double t, bool deadline_due) {
        log(ed1_fire(plant_, t, plant_.x[0]));
        if (ed2_on_arrival(ctrl_, plant_.y_latched, cfg_.thresholds.gamma_ybar)) {
            log(ed2_fire(ctrl_, design_, t, plant_.y_latched, Condition::e_ybar));
        } else if (deadline_due) {
            log(ed2_fire(ctrl_, design_, t, plant_.y_latched, ctrl_.deadline.cause));
        }
    }

    void log(const EventRecord& e) {
        result_.events.push_back(e);
        if (static_cast<long>(result_.events.size()) > cfg_.max_events) {
            throw EventStorm("event storm: more than " + std::to_string(cfg_.max_events) + " events by t=" +
                             std::to_string(e.t) + " (last " + std::string(to_string(e.detector)) + " on " +
                             std::string(to_string(e.condition)) + ")");
        }
    }

    void record() {
        const double t = plant_.t;
        Sample s;
        s.t = t;
        s.x = plant_.x;
        s.ybar = plant_.y_latched;
        s.ybar_tj = ctrl_.latched.ybar;
        s.u = ctrl_.u_held;
        s.xi = ctrl_.xi_at(t);
        s.zeta = ctrl_.zeta_at(t);
        s.theta_hat = ctrl_.theta_hat_at(t);
        s.alpha_f = ctrl_.alpha_f_at(t);
        const FrameInputs f{s.x, s.xi, s.zeta, s.theta_hat, s.alpha_f};
        const auto lv = lyapunov_value(f, P_, cfg_.model.theta_true, cfg_.gains, cfg_.k, cfg_.model.psi[0]);
        s.eps_norm = lv.eps.norm();
        s.V = lv.V;
        if (!std::isfinite(s.V) || !s.xi.allFinite() || !s.zeta.allFinite() || !std::isfinite(s.theta_hat)) {
            throw NumericalError("non-finite controller state", t, !std::isfinite(s.V) ? "V" : "xi/zeta/theta_hat");
        }
        result_.samples.push_back(std::move(s));
    }

    const SimConfig& cfg_;
    ControllerDesign design_;
    Mat P_;
    PlantState plant_;
    ControllerState ctrl_;
    SimResult result_;
};

} // namespace detail

inline SimResult run_simulation(const SimConfig& cfg) {
    cfg.validate();
    return detail::ClosedLoop(cfg).run();
}

} // namespace etcsim
