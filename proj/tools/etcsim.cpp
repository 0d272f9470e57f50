// etcsim: simulate, advise, compare-baseline and sweep commands.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.

#include "etcsim/advisor.hpp"
#include "etcsim/analysis.hpp"
#include "etcsim/baseline.hpp"
#include "etcsim/config.hpp"
#include "etcsim/engine.hpp"
#include "etcsim/io.hpp"
#include "etcsim/sweep.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace etcsim;

struct Options {
    std::string config;
    std::string out = "out";
    std::string sweep_spec;
    std::optional<double> q;
    std::optional<double> c_Delta;
    std::optional<double> c_delta;
    std::optional<double> h;
    std::optional<double> t_end;
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Config document with command-line overrides applied, so sweeps and
/// single runs see the same values.
nlohmann::json config_doc(const Options& o) {
    nlohmann::json doc = read_json(o.config);
    if (o.h) doc["sim"]["h"] = *o.h;
    if (o.t_end) doc["sim"]["t_end"] = *o.t_end;
    if (o.q) doc["analysis"]["q"] = *o.q;
    if (o.c_Delta) doc["analysis"]["c_Delta"] = *o.c_Delta;
    if (o.c_delta) doc["analysis"]["c_delta"] = *o.c_delta;
    return doc;
}

FullConfig load(const Options& o) {
    FullConfig fc = config_from_json(config_doc(o));
    try {
        fc.sim.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return fc;
}

void write_failure(const Options& o, const std::string& what, std::optional<double> t, const std::string& signal) {
    nlohmann::json j{{"error", what}};
    if (t) j["time"] = *t;
    if (!signal.empty()) j["signal"] = signal;
    std::filesystem::create_directories(o.out);
    std::ofstream(std::filesystem::path(o.out) / "error.json") << j.dump(2) << "\n";
    std::cerr << "numerical failure: " << what << "\n";
}

int cmd_simulate(const Options& o) {
    const FullConfig fc = load(o);
    const SimResult r = run_simulation(fc.sim);
    ArtifactWriter w(o.out);
    const int n = fc.sim.model.n;
    w.write("trajectory.csv", trajectory_csv(r, n));
    w.write("events.csv", events_csv(r.events));
    nlohmann::json s = summary_json(r, fc.sim);
    s["replay_consistent"] = (replay_summary(r), true);
    w.write_json("summary.json", s);
    w.finish("simulate", o.config);
    std::cout << "ED1 " << r.summary.ed1.count << "  ED2 " << r.summary.ed2.count << "  tail sup|y| "
              << r.summary.tail_sup_y << "\n";
    return 0;
}

int cmd_advise(const Options& o) {
    const FullConfig fc = load(o);
    const AdvisorReport rep = advise_parameters(advisor_inputs(fc));
    ArtifactWriter w(o.out);
    w.write_json("advisor.json", advisor_json(rep));
    w.finish("advise", o.config);
    for (const auto& c : rep.constraints) {
        std::cout << (c.satisfied ? "ok    " : "FAIL  ") << c.name << "  margin " << c.margin << "\n";
    }
    std::cout << "suggested delta " << rep.suggested_delta << ", c(beta) " << rep.c_of_beta << ", q floor "
              << rep.q_floor << "\n";
    return 0;
}

int cmd_compare_baseline(const Options& o) {
    const FullConfig fc = load(o);
    if (!is_baseline_shape(fc)) {
        throw ConfigError("compare-baseline supports only n=2 with psi = (cos(y), y+1)");
    }
    const SimResult ours = run_simulation(fc.sim);
    const BaselineResult base = run_baseline(fc.baseline);
    nlohmann::json j;
    j["tool_version"] = std::string(kToolVersion);
    j["ours"] = {{"controller_to_plant", ours.summary.ed2.count},
                 {"plant_to_controller", ours.summary.ed1.count},
                 {"tail_sup_y", ours.summary.tail_sup_y}};
    j["baseline"] = {{"controller_to_plant", base.controller_to_plant},
                     {"plant_to_controller", base.plant_to_controller},
                     {"tail_sup_y", base.tail_sup_y}};
    j["tail_start"] = fc.sim.tail_start_or_default();
    j["tail_ratio"] = ours.summary.tail_sup_y / base.tail_sup_y;
    ArtifactWriter w(o.out);
    w.write_json("comparison.json", j);
    w.finish("compare-baseline", o.config);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const Options& o) {
    const nlohmann::json base = config_doc(o);
    const SweepSpec spec = sweep_from_json(read_json(o.sweep_spec));
    const auto rows = run_sweep(base, spec, sweep_threads());

    std::ostringstream csv;
    csv << "index";
    for (const auto& p : spec.params) csv << ',' << p.path;
    csv << ",ok,ed1_count,ed2_count,ed1_min_gap,ed2_min_gap,tail_sup_y,V_max,lemma1_max_error,error\n";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        csv << r.index;
        for (double v : r.values) csv << ',' << fmt17(v);
        const Summary& s = r.summary;
        csv << ',' << (r.ok ? 1 : 0) << ',' << s.ed1.count << ',' << s.ed2.count << ',' << fmt17(s.ed1.min_gap)
            << ',' << fmt17(s.ed2.min_gap) << ',' << fmt17(s.tail_sup_y) << ',' << fmt17(s.V_max) << ','
            << fmt17(s.lemma1_max_error) << ",\"" << r.error << "\"\n";
        nlohmann::json row{{"index", r.index}, {"values", r.values}, {"ok", r.ok}};
        if (r.ok) {
            row["ed1"] = detector_json(s.ed1);
            row["ed2"] = detector_json(s.ed2);
            row["tail_sup_y"] = s.tail_sup_y;
            row["V_max"] = s.V_max;
            row["lemma1_max_error"] = s.lemma1_max_error;
        } else {
            row["error"] = r.error;
        }
        arr.push_back(row);
    }
    ArtifactWriter w(o.out);
    w.write("sweep.csv", csv.str());
    w.write_json("sweep.json", {{"tool_version", std::string(kToolVersion)}, {"rows", arr}});
    w.finish("sweep", o.config);
    std::cout << csv.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered adaptive output-feedback control simulator"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--h", o.h, "override base step");
        sub->add_option("--t-end", o.t_end, "override horizon");
    };
    auto* sim = app.add_subcommand("simulate", "run the closed loop and write trajectory/events/summary");
    common(sim);
    sim->add_option("--q", o.q, "invariant-set level for the containment check");
    auto* adv = app.add_subcommand("advise", "check the design against the gain conditions");
    common(adv);
    adv->add_option("--q", o.q, "invariant-set level");
    adv->add_option("--c-delta", o.c_Delta, "slack c_Delta for the unresolved bound terms");
    adv->add_option("--c-small-delta", o.c_delta, "factor c_delta > 1 in the recommended delta");
    auto* cmp = app.add_subcommand("compare-baseline", "compare against the full-state event-triggered loop");
    common(cmp);
    auto* swp = app.add_subcommand("sweep", "run a parameter sweep");
    common(swp);
    swp->add_option("--sweep", o.sweep_spec, "sweep specification (JSON)")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim) return cmd_simulate(o);
        if (*adv) return cmd_advise(o);
        if (*cmp) return cmd_compare_baseline(o);
        if (*swp) return cmd_sweep(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const AdvisorError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        write_failure(o, e.what(), e.time(), e.signal());
        return 2;
    } catch (const EventStorm& e) {
        write_failure(o, e.what(), std::nullopt, "");
        return 2;
    } catch (const EvalError& e) {
        write_failure(o, e.what(), std::nullopt, "psi");
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
