#pragma once

// Post-hoc checks over a finished run: output/sample error bound, invariance
// of the V sublevel set, ultimate bound on |y|, V continuity across events
// and inter-event statistics.

#include "etcsim/controller.hpp"
#include "etcsim/engine.hpp"
#include "etcsim/events.hpp"
#include "etcsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace etcsim {

struct Lemma1Audit {
    double max_error = 0.0;
    long violations = 0;
    double bound = 0.0;  // gamma_y + gamma_ybar + slack
};

/// Largest |y| rate along the recorded samples.
inline double max_output_rate(const SimResult& r, const PlantModel& m) {
    double best = 0.0;
    for (const auto& s : r.samples) best = std::max(best, std::abs(plant_derivative(s.x, s.u, m)[0]));
    return best;
}

/// Slack allowed on top of gamma_y + gamma_ybar: ten localisation tolerances
/// worth of output motion.
inline double lemma1_slack(const SimResult& r, const PlantModel& m, double loc_tol) {
    return 10.0 * loc_tol * max_output_rate(r, m);
}

/// Checks |y(t) - ybar(t_j)| <= gamma_y + gamma_ybar + slack at every recorded instant.
inline Lemma1Audit lemma1_audit(const SimResult& r, const TriggerThresholds& thr, double slack) {
    Lemma1Audit a;
    a.bound = thr.gamma_y_tilde() + slack;
    for (const auto& s : r.samples) {
        const double err = std::abs(s.y() - s.ybar_tj);
        a.max_error = std::max(a.max_error, err);
        if (err > a.bound) ++a.violations;
    }
    return a;
}

struct InvarianceCheck {
    bool precondition_ok = false;  // V(0) <= q
    bool contained = false;
    double V0 = 0.0;
    double V_max = 0.0;
};

/// Whether the run stays in {V <= q}. Skipped (contained = false) when V(0) > q.
inline InvarianceCheck invariance_check(const SimResult& r, double q) {
    InvarianceCheck c;
    if (r.samples.empty()) throw std::invalid_argument("invariance_check: no samples");
    c.V0 = r.samples.front().V;
    for (const auto& s : r.samples) c.V_max = std::max(c.V_max, s.V);
    c.precondition_ok = c.V0 <= q;
    c.contained = c.precondition_ok && c.V_max <= q * (1.0 + 1e-6);
    return c;
}

/// sup |y(t)| over recorded t >= tail_start.
inline double practical_bound(const SimResult& r, double tail_start) {
    double sup = 0.0;
    bool any = false;
    for (const auto& s : r.samples) {
        if (s.t >= tail_start) {
            sup = std::max(sup, std::abs(s.y()));
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("practical_bound: empty tail window");
    return sup;
}

/// Largest change of V between consecutive samples taken at the same instant
/// (the pre- and post-event frames).
inline double lyapunov_jump_max(const SimResult& r) {
    double jump = 0.0;
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        if (r.samples[i].t == r.samples[i - 1].t) {
            jump = std::max(jump, std::abs(r.samples[i].V - r.samples[i - 1].V));
        }
    }
    return jump;
}

struct TriggerStatistics {
    DetectorStats ed1;
    DetectorStats ed2;
};

inline TriggerStatistics trigger_statistics(const EventLog& events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].t < events[i - 1].t) throw std::invalid_argument("trigger_statistics: events not time-sorted");
    }
    return {detector_stats(events, Detector::ED1), detector_stats(events, Detector::ED2)};
}

} // namespace etcsim
