#pragma once

#include <string_view>
#include <vector>

namespace etcsim {

enum class Detector { ED1, ED2 };

/// Which threshold condition caused a firing.
enum class Condition { e_y, e_ybar, e_xi, e_zeta, e_h, e_f };

struct EventRecord {
    double t = 0.0;
    Detector detector = Detector::ED1;
    Condition condition = Condition::e_y;
    double value = 0.0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

using EventLog = std::vector<EventRecord>;

constexpr std::string_view to_string(Detector d) { return d == Detector::ED1 ? "ED1" : "ED2"; }

constexpr std::string_view to_string(Condition c) {
    switch (c) {
    case Condition::e_y: return "e_y";
    case Condition::e_ybar: return "e_ybar";
    case Condition::e_xi: return "e_xi";
    case Condition::e_zeta: return "e_zeta";
    case Condition::e_h: return "e_h";
    case Condition::e_f: return "e_f";
    }
    return "?";
}

} // namespace etcsim
