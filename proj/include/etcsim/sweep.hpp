#pragma once

// Parameter sweeps over a base configuration. A sweep spec is JSON:
//
//   { "mode": "grid" | "zip",
//     "params": [ { "path": "triggers.gamma_y", "values": [0.05, 0.3] },
//                 { "path": "controller.c[0]",  "values": [8.5, 10] } ] }
//
// "grid" takes the Cartesian product (first parameter varies slowest);
// "zip" pairs the i-th values of every parameter. Rows are returned in grid
// order regardless of how many worker threads ran them.

#include "etcsim/config.hpp"
#include "etcsim/engine.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace etcsim {

struct SweepParam {
    std::string path;
    std::vector<double> values;
};

struct SweepSpec {
    bool zip = false;
    std::vector<SweepParam> params;
};

struct SweepRow {
    std::size_t index = 0;
    std::vector<double> values;
    bool ok = false;
    std::string error;
    Summary summary;
};

inline SweepSpec sweep_from_json(const nlohmann::json& j) {
    SweepSpec s;
    if (!j.is_object()) throw ConfigError("sweep: spec must be an object");
    const std::string mode = j.value("mode", "grid");
    if (mode != "grid" && mode != "zip") throw ConfigError("sweep: mode must be 'grid' or 'zip'");
    s.zip = mode == "zip";
    if (!j.contains("params") || !j.at("params").is_array() || j.at("params").empty()) {
        throw ConfigError("sweep: 'params' must be a non-empty array");
    }
    for (const auto& p : j.at("params")) {
        SweepParam sp;
        if (!p.contains("path") || !p.at("path").is_string()) throw ConfigError("sweep: every param needs a 'path'");
        sp.path = p.at("path").get<std::string>();
        if (!p.contains("values") || !p.at("values").is_array() || p.at("values").empty()) {
            throw ConfigError("sweep: '" + sp.path + "' has an empty value grid");
        }
        for (const auto& v : p.at("values")) {
            if (!v.is_number()) throw ConfigError("sweep: values of '" + sp.path + "' must be numbers");
            sp.values.push_back(v.get<double>());
        }
        s.params.push_back(std::move(sp));
    }
    if (s.zip) {
        for (const auto& p : s.params) {
            if (p.values.size() != s.params.front().values.size()) {
                throw ConfigError("sweep: zip mode needs equally long value lists");
            }
        }
    }
    return s;
}

/// Sets `section.key` or `section.key[i]` inside a config document. The
/// target must already exist and be numeric.
inline void set_path(nlohmann::json& doc, const std::string& path, double value) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ConfigError("sweep: invalid path '" + path + "'");
    const std::string sec = path.substr(0, dot);
    std::string key = path.substr(dot + 1);
    long index = -1;
    if (const auto br = key.find('['); br != std::string::npos) {
        if (key.back() != ']') throw ConfigError("sweep: invalid path '" + path + "'");
        const std::string num = key.substr(br + 1, key.size() - br - 2);
        if (num.empty() || !std::all_of(num.begin(), num.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw ConfigError("sweep: invalid index in '" + path + "'");
        }
        index = std::stol(num);
        key = key.substr(0, br);
    }
    if (!doc.contains(sec) || !doc[sec].is_object() || !doc[sec].contains(key)) {
        throw ConfigError("sweep: invalid path '" + path + "'");
    }
    auto& target = doc[sec][key];
    if (index >= 0) {
        if (!target.is_array() || static_cast<std::size_t>(index) >= target.size() || !target[index].is_number()) {
            throw ConfigError("sweep: invalid path '" + path + "'");
        }
        target[static_cast<std::size_t>(index)] = value;
    } else {
        if (!target.is_number()) throw ConfigError("sweep: invalid path '" + path + "'");
        target = value;
    }
}

/// Value tuples in grid order.
inline std::vector<std::vector<double>> sweep_points(const SweepSpec& s) {
    std::vector<std::vector<double>> pts;
    if (s.zip) {
        for (std::size_t i = 0; i < s.params.front().values.size(); ++i) {
            std::vector<double> row;
            for (const auto& p : s.params) row.push_back(p.values[i]);
            pts.push_back(std::move(row));
        }
        return pts;
    }
    pts.emplace_back();
    for (const auto& p : s.params) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : pts) {
            for (double v : p.values) {
                auto row = prefix;
                row.push_back(v);
                next.push_back(std::move(row));
            }
        }
        pts = std::move(next);
    }
    return pts;
}

/// Worker count from ETCSIM_THREADS, defaulting to the hardware concurrency.
inline unsigned sweep_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ETCSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return hw;
}

/// Runs every point of the sweep. Paths are validated up front; a point whose
/// configuration is rejected or whose run fails is reported in its row.
inline std::vector<SweepRow> run_sweep(const nlohmann::json& base, const SweepSpec& spec, unsigned threads) {
    const auto pts = sweep_points(spec);
    for (const auto& p : spec.params) {
        nlohmann::json probe = base;
        set_path(probe, p.path, p.values.front());
    }
    std::vector<SweepRow> rows(pts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            SweepRow& row = rows[i];
            row.index = i;
            row.values = pts[i];
            try {
                nlohmann::json doc = base;
                for (std::size_t k = 0; k < spec.params.size(); ++k) set_path(doc, spec.params[k].path, pts[i][k]);
                FullConfig fc = config_from_json(doc);
                fc.sim.validate();
                row.summary = run_simulation(fc.sim).summary;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pts.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

} // namespace etcsim
