#pragma once

// JSON configuration with sections system / observer / controller /
// triggers / init / sim / analysis / baseline. Nonlinearities are given as
// expression strings in `y`.

#include "etcsim/advisor.hpp"
#include "etcsim/baseline.hpp"
#include "etcsim/engine.hpp"
#include "etcsim/expr.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AnalysisOptions {
    std::optional<double> q;
    double c_Delta = 0.0;
    double c_delta = 2.0;
    std::optional<double> c0;
};

struct FullConfig {
    SimConfig sim;
    AnalysisOptions analysis;
    BaselineConfig baseline;
    std::vector<std::string> psi_text;
};

namespace detail {

inline const nlohmann::json& section(const nlohmann::json& doc, const char* name) {
    if (!doc.contains(name) || !doc.at(name).is_object()) {
        throw ConfigError(std::string("config: missing section '") + name + "'");
    }
    return doc.at(name);
}

inline double number(const nlohmann::json& sec, const char* sec_name, const char* key) {
    if (!sec.contains(key)) throw ConfigError(std::string("config: missing ") + sec_name + "." + key);
    const auto& v = sec.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config: ") + sec_name + "." + key + " must be a number");
    return v.get<double>();
}

inline double number_or(const nlohmann::json& sec, const char* sec_name, const char* key, double dflt) {
    return sec.contains(key) ? number(sec, sec_name, key) : dflt;
}

inline Vec vector(const nlohmann::json& sec, const char* sec_name, const char* key) {
    if (!sec.contains(key)) throw ConfigError(std::string("config: missing ") + sec_name + "." + key);
    const auto& v = sec.at(key);
    if (!v.is_array()) throw ConfigError(std::string("config: ") + sec_name + "." + key + " must be an array");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(std::string("config: ") + sec_name + "." + key + " must hold numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

} // namespace detail

inline FullConfig config_from_json(const nlohmann::json& doc) {
    using detail::number;
    using detail::number_or;
    using detail::section;
    using detail::vector;
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    FullConfig fc;
    SimConfig& c = fc.sim;

    const auto& sys = section(doc, "system");
    const double n_raw = number(sys, "system", "n");
    if (n_raw != static_cast<double>(static_cast<int>(n_raw)) || n_raw < 1) throw ConfigError("config: system.n must be a positive integer");
    c.model.n = static_cast<int>(n_raw);
    c.model.theta_true = number(sys, "system", "theta");
    c.model.theta_bar = number(sys, "system", "theta_bar");
    if (!sys.contains("psi") || !sys.at("psi").is_array()) throw ConfigError("config: system.psi must be an array of strings");
    std::size_t idx = 0;
    for (const auto& p : sys.at("psi")) {
        ++idx;
        if (!p.is_string()) throw ConfigError("config: system.psi entries must be strings");
        const auto text = p.get<std::string>();
        try {
            c.model.psi.push_back(parse_expr(text));
        } catch (const ParseError& e) {
            throw ConfigError("config: system.psi[" + std::to_string(idx) + "] '" + text + "': " + e.what());
        }
        fc.psi_text.push_back(text);
    }
    c.model.lipschitz = to_std(vector(sys, "system", "lipschitz"));
    c.model.psi_bound = to_std(vector(sys, "system", "psi_bound"));

    const auto& obs = section(doc, "observer");
    c.k = vector(obs, "observer", "k");

    const auto& ctl = section(doc, "controller");
    c.gains.c = vector(ctl, "controller", "c");
    c.gains.rho = vector(ctl, "controller", "rho");
    c.gains.phi = vector(ctl, "controller", "phi");
    c.gains.varrho = vector(ctl, "controller", "varrho");
    c.gains.delta = number(ctl, "controller", "delta");
    c.gains.sigma = number(ctl, "controller", "sigma");

    const auto& trg = section(doc, "triggers");
    c.thresholds.gamma_y = number(trg, "triggers", "gamma_y");
    c.thresholds.gamma_ybar = number(trg, "triggers", "gamma_ybar");
    c.thresholds.gamma_xi = number(trg, "triggers", "gamma_xi");
    c.thresholds.gamma_zeta = number(trg, "triggers", "gamma_zeta");
    c.thresholds.gamma_h = number(trg, "triggers", "gamma_h");
    c.thresholds.gamma_f = number(trg, "triggers", "gamma_f");

    const auto& ini = section(doc, "init");
    c.init.x0 = vector(ini, "init", "x0");
    c.init.xi0 = vector(ini, "init", "xi0");
    c.init.zeta0 = vector(ini, "init", "zeta0");
    c.init.theta_hat0 = number(ini, "init", "theta_hat0");
    c.init.alpha_f0 = vector(ini, "init", "alpha_f0");

    const auto& sim = section(doc, "sim");
    c.t_end = number(sim, "sim", "t_end");
    c.h = number(sim, "sim", "h");
    c.record_stride = static_cast<int>(number_or(sim, "sim", "record_stride", 1));
    c.loc_tol = number_or(sim, "sim", "loc_tol", 1e-9);

    static const nlohmann::json empty = nlohmann::json::object();
    const auto& ana = doc.contains("analysis") ? section(doc, "analysis") : empty;
    if (ana.contains("q")) {
        c.q = number(ana, "analysis", "q");
        fc.analysis.q = c.q;
    }
    if (ana.contains("tail_start")) c.tail_start = number(ana, "analysis", "tail_start");
    fc.analysis.c_Delta = number_or(ana, "analysis", "c_Delta", 0.0);
    fc.analysis.c_delta = number_or(ana, "analysis", "c_delta", 2.0);
    if (ana.contains("c0")) fc.analysis.c0 = number(ana, "analysis", "c0");

    const auto& bl = doc.contains("baseline") ? section(doc, "baseline") : empty;
    BaselineConfig& b = fc.baseline;
    b.gamma_c = number_or(bl, "baseline", "gamma_c", 0.06);
    b.k_fb = number_or(bl, "baseline", "k", 4.0);
    b.c_fb = number_or(bl, "baseline", "c", 4.0);
    b.leak = number_or(bl, "baseline", "leak", 1.5);
    b.theta_hat0 = number_or(bl, "baseline", "theta_hat0", c.init.theta_hat0);
    b.theta_true = c.model.theta_true;
    b.h = c.h;
    b.t_end = c.t_end;
    b.x0 = c.init.x0;
    b.tail_start = c.tail_start_or_default();
    b.loc_tol = c.loc_tol;
    return fc;
}

/// Reads and validates a configuration file. Any problem is a ConfigError.
inline FullConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    FullConfig fc = config_from_json(doc);
    try {
        fc.sim.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return fc;
}

inline AdvisorInputs advisor_inputs(const FullConfig& fc) {
    AdvisorInputs a;
    a.model = fc.sim.model;
    a.k = fc.sim.k;
    a.gains = fc.sim.gains;
    a.thresholds = fc.sim.thresholds;
    a.q = fc.analysis.q.value_or(50.0);
    a.c_Delta = fc.analysis.c_Delta;
    a.c_delta = fc.analysis.c_delta;
    a.c0 = fc.analysis.c0;
    return a;
}

/// True when the configuration is the second-order example the comparison
/// loop is written for: n = 2, psi = (cos(y), y + 1).
inline bool is_baseline_shape(const FullConfig& fc) {
    if (fc.sim.model.n != 2 || fc.sim.model.psi.size() != 2) return false;
    return fc.sim.model.psi[0] == parse_expr("cos(y)") && fc.sim.model.psi[1] == parse_expr("y+1");
}

} // namespace etcsim
