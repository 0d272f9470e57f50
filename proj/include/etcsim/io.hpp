#pragma once

// Output artifacts: trajectory/event CSV, summary and advisor JSON, and the
// run manifest with content hashes. All text is produced deterministically;
// reals are written with 17 significant digits.

#include "etcsim/advisor.hpp"
#include "etcsim/analysis.hpp"
#include "etcsim/config.hpp"
#include "etcsim/engine.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace etcsim {

inline constexpr std::string_view kToolVersion = "etcsim 1.0.0";

inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON has no infinity; unbounded values are written as null.
inline nlohmann::json json_real(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

inline std::string trajectory_csv(const SimResult& r, int n) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    os << ",y,ybar,u";
    for (int i = 1; i <= n; ++i) os << ",xi" << i;
    for (int i = 1; i <= n; ++i) os << ",zeta" << i;
    os << ",theta_hat";
    for (int i = 2; i <= n; ++i) os << ",alpha_f" << i;
    os << ",eps_norm,V,ybar_tj\n";
    for (const auto& s : r.samples) {
        os << fmt17(s.t);
        for (int i = 0; i < n; ++i) os << ',' << fmt17(s.x[i]);
        os << ',' << fmt17(s.y()) << ',' << fmt17(s.ybar) << ',' << fmt17(s.u);
        for (int i = 0; i < n; ++i) os << ',' << fmt17(s.xi[i]);
        for (int i = 0; i < n; ++i) os << ',' << fmt17(s.zeta[i]);
        os << ',' << fmt17(s.theta_hat);
        for (int i = 0; i + 1 < n; ++i) os << ',' << fmt17(s.alpha_f[i]);
        os << ',' << fmt17(s.eps_norm) << ',' << fmt17(s.V) << ',' << fmt17(s.ybar_tj) << '\n';
    }
    return os.str();
}

inline std::string events_csv(const EventLog& events) {
    std::ostringstream os;
    os << "t,detector,condition,value\n";
    for (const auto& e : events) {
        os << fmt17(e.t) << ',' << to_string(e.detector) << ',' << to_string(e.condition) << ',' << fmt17(e.value)
           << '\n';
    }
    return os.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_real(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::nan("");
    return std::stod(s);
}

} // namespace detail

/// Rebuilds a SimResult (samples and events) from the CSV artifacts so the
/// summary can be recomputed from files alone.
inline SimResult result_from_csv(const std::string& trajectory, const std::string& events, int n) {
    SimResult r;
    std::istringstream ts(trajectory);
    std::string line;
    std::getline(ts, line);  // header
    const auto m = static_cast<Eigen::Index>(n);
    while (std::getline(ts, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        const std::size_t expected = 1 + 3 * static_cast<std::size_t>(n) + 3 + 1 + (static_cast<std::size_t>(n) - 1) + 3;
        if (f.size() != expected) throw std::runtime_error("trajectory.csv: unexpected column count");
        std::size_t i = 0;
        Sample s;
        s.t = detail::parse_real(f[i++]);
        s.x = Vec(m);
        for (Eigen::Index j = 0; j < m; ++j) s.x[j] = detail::parse_real(f[i++]);
        ++i;  // y duplicates x1
        s.ybar = detail::parse_real(f[i++]);
        s.u = detail::parse_real(f[i++]);
        s.xi = Vec(m);
        for (Eigen::Index j = 0; j < m; ++j) s.xi[j] = detail::parse_real(f[i++]);
        s.zeta = Vec(m);
        for (Eigen::Index j = 0; j < m; ++j) s.zeta[j] = detail::parse_real(f[i++]);
        s.theta_hat = detail::parse_real(f[i++]);
        s.alpha_f = Vec(m - 1);
        for (Eigen::Index j = 0; j + 1 < m; ++j) s.alpha_f[j] = detail::parse_real(f[i++]);
        s.eps_norm = detail::parse_real(f[i++]);
        s.V = detail::parse_real(f[i++]);
        s.ybar_tj = detail::parse_real(f[i++]);
        r.samples.push_back(std::move(s));
    }
    std::istringstream es(events);
    std::getline(es, line);
    while (std::getline(es, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 4) throw std::runtime_error("events.csv: unexpected column count");
        EventRecord e;
        e.t = detail::parse_real(f[0]);
        e.detector = f[1] == "ED1" ? Detector::ED1 : Detector::ED2;
        static constexpr Condition all[] = {Condition::e_y,    Condition::e_ybar, Condition::e_xi,
                                            Condition::e_zeta, Condition::e_h,    Condition::e_f};
        bool found = false;
        for (Condition c : all) {
            if (to_string(c) == f[2]) {
                e.condition = c;
                found = true;
            }
        }
        if (!found) throw std::runtime_error("events.csv: unknown condition '" + f[2] + "'");
        e.value = detail::parse_real(f[3]);
        r.events.push_back(e);
    }
    return r;
}

inline nlohmann::json detector_json(const DetectorStats& s) {
    return {{"count", s.count}, {"min_gap", json_real(s.min_gap)}, {"mean_gap", json_real(s.mean_gap)}};
}

/// Everything reported about one closed-loop run.
inline nlohmann::json summary_json(const SimResult& r, const SimConfig& cfg) {
    const Summary& s = r.summary;
    const double slack = lemma1_slack(r, cfg.model, cfg.loc_tol);
    const auto audit = lemma1_audit(r, cfg.thresholds, slack);
    const bool zeno_ok = (s.ed1.count < 2 || s.ed1.min_gap >= cfg.loc_tol) &&
                         (s.ed2.count < 2 || s.ed2.min_gap >= cfg.loc_tol);
    nlohmann::json j;
    j["tool_version"] = std::string(kToolVersion);
    j["ed1"] = detector_json(s.ed1);
    j["ed2"] = detector_json(s.ed2);
    j["tail_start"] = s.tail_start;
    j["tail_sup_y"] = s.tail_sup_y;
    j["V_max"] = s.V_max;
    j["V0"] = r.samples.front().V;
    j["V_jump_max"] = lyapunov_jump_max(r);
    j["lemma1"] = {{"max_error", s.lemma1_max_error},
                   {"bound", audit.bound},
                   {"slack", slack},
                   {"violations", audit.violations}};
    j["zeno"] = {{"loc_tol", cfg.loc_tol},
                 {"ed1_min_gap", json_real(s.ed1.min_gap)},
                 {"ed2_min_gap", json_real(s.ed2.min_gap)},
                 {"excluded", zeno_ok}};
    if (cfg.q) {
        const auto inv = invariance_check(r, *cfg.q);
        j["invariance"] = {{"q", *cfg.q},
                           {"V0", inv.V0},
                           {"V_max", inv.V_max},
                           {"precondition_ok", inv.precondition_ok},
                           {"contained", inv.contained}};
    }
    return j;
}

inline std::string check_kind_name(CheckKind k) { return k == CheckKind::Structural ? "structural" : "recipe"; }

inline nlohmann::json advisor_json(const AdvisorReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.constraints) {
        checks.push_back({{"name", c.name},
                          {"kind", check_kind_name(c.kind)},
                          {"satisfied", c.satisfied},
                          {"margin", json_real(c.margin)},
                          {"inequality", c.inequality}});
    }
    nlohmann::json P = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.P.P.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < r.P.P.cols(); ++j) row.push_back(r.P.P(i, j));
        P.push_back(row);
    }
    return {{"tool_version", std::string(kToolVersion)},
            {"A_c_hurwitz", r.A_c_hurwitz},
            {"P", {{"matrix", P},
                   {"lambda_min", r.P.lambda_min},
                   {"lambda_max", r.P.lambda_max},
                   {"residual_norm", r.P.residual_norm}}},
            {"constraints", checks},
            {"all_structural_pass", r.all_structural_pass()},
            {"all_pass", r.all_pass()},
            {"suggested_delta", r.suggested_delta},
            {"c_lower_bounds", r.c_lower_bounds},
            {"c_bar", r.c_bar},
            {"c0", r.c0},
            {"c_of_beta", r.c_of_beta},
            {"delta_bar", r.delta_bar},
            {"sigma_bar", r.sigma_bar},
            {"lambda_bar", r.lambda_bar},
            {"eta", {{"eta0", r.eta0}, {"eta1", r.eta1}, {"eta2", r.eta2}, {"eta3", r.eta3}}},
            {"eta_floor", r.eta_floor},
            {"q_floor", r.q_floor}};
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Writes `text` to dir/name and records it for the manifest.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& text) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
        out << text;
        files_.push_back({{"name", name}, {"sha256", sha256_hex(text)}});
    }

    void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

    /// manifest.json: inputs, command and the hash of every artifact written.
    void finish(const std::string& command, const std::string& config_path) {
        nlohmann::json m;
        m["tool_version"] = std::string(kToolVersion);
        m["command"] = command;
        m["config_path"] = config_path;
        m["config_sha256"] = sha256_hex(read_file(config_path));
        m["output_dir"] = dir_.string();
        m["files"] = files_;
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << "\n";
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    nlohmann::json files_ = nlohmann::json::array();
};

} // namespace etcsim
