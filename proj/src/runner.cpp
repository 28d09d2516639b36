#include "msstab/runner.hpp"

#include "msstab/benchmarks.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace msstab {

namespace {

json settings_json(const RunOptions& o) {
    return {{"mode", o.mode},   {"pwl_n", o.pwl_n},   {"grid_n", o.grid_n}, {"eps", o.eps},
            {"tol", o.tol},     {"seed", o.seed},     {"paths", o.paths},   {"threads", o.threads}};
}

ClockOptions clock_options(const RunOptions& o) {
    ClockOptions c;
    c.pwl_segments = o.pwl_n;
    c.grid_points = o.grid_n;
    c.eps = o.eps;
    return c;
}

CertMode parse_mode(const std::string& mode, const std::string& fallback) {
    const std::string m = mode.empty() ? fallback : mode;
    if (m == "exact") return CertMode::Exact;
    if (m == "pwl") return CertMode::Pwl;
    if (m == "lifted") return CertMode::Lifted;
    throw ConfigError("options.mode", "expected exact|pwl|lifted, got '" + m + "'");
}

json analyze_task(const json& config, const RunOptions& opts) {
    const AnySystem sys = system_from_json(config.at("system"), "system");
    const json& task = config.at("task");
    const DwellTimeSpec dwell = dwell_from_json(task.at("dwell"), "task.dwell");
    const ClockOptions copts = clock_options(opts);
    const std::string mode = opts.mode.empty() ? std::string("exact") : opts.mode;

    StabilityCertificate cert;
    if (const auto* sw = std::get_if<SwitchedSystem>(&sys)) {
        const auto* m = std::get_if<MinimumDwell>(&dwell);
        if (!m) throw ConfigError("task.dwell.type", "switched systems support the minimum dwell-time test");
        cert = switched_min_dt(*sw, m->T, opts.pwl_n, copts);
    } else {
        ImpulsiveSystem imp;
        if (const auto* sd = std::get_if<SampledDataSystem>(&sys))
            imp = sampled_data_to_impulsive(*sd);
        else
            imp = std::get<ImpulsiveSystem>(sys);
        if (const auto* c = std::get_if<ConstantDwell>(&dwell)) {
            cert = mode == "pwl" ? pwl_constant_dt(imp, c->T, opts.pwl_n, copts)
                                 : exact_constant_dt(imp, c->T, copts);
        } else if (const auto* r = std::get_if<RangedDwell>(&dwell)) {
            if (mode == "pwl")
                cert = pwl_ranged_dt(imp, r->T_min, r->T_max, opts.pwl_n, copts);
            else if (mode == "lifted")
                cert = lifted_quadratic_stability(imp, r->T_min, r->T_max, opts.grid_n, copts);
            else
                cert = exact_ranged_dt(imp, r->T_min, r->T_max, opts.grid_n, copts);
        } else {
            const auto* m = std::get_if<MinimumDwell>(&dwell);
            cert = mode == "pwl" ? pwl_minimum_dt(imp, m->T, opts.pwl_n, copts)
                                 : exact_minimum_dt(imp, m->T, copts);
        }
    }
    json out;
    out["certificate"] = certificate_to_json(cert);
    out["verdict"] = cert.verdict;
    return out;
}

json search_task(const json& config, const RunOptions& opts, std::vector<double>* scan_T,
                 std::vector<double>* scan_rho) {
    const AnySystem asys = system_from_json(config.at("system"), "system");
    const auto* impp = std::get_if<ImpulsiveSystem>(&asys);
    ImpulsiveSystem imp;
    if (impp)
        imp = *impp;
    else if (const auto* sd = std::get_if<SampledDataSystem>(&asys))
        imp = sampled_data_to_impulsive(*sd);
    else
        throw ConfigError("system.type", "searches operate on impulsive or sampled-data systems");

    const json& task = config.at("task");
    const std::string target = task.value("target", "smallest_constant_dt");
    SearchOptions sopts;
    sopts.tol = opts.tol;
    sopts.pwl_segments = opts.pwl_n;
    sopts.grid_points = opts.grid_n;
    sopts.threads = opts.threads;
    sopts.clock = clock_options(opts);

    json out;
    out["target"] = target;
    try {
        if (target == "smallest_constant_dt") {
            const double lo = task.value("range", json::array({0.05, 6.0}))[0].get<double>();
            const double hi = task.value("range", json::array({0.05, 6.0}))[1].get<double>();
            SearchResult res = opts.mode == "pwl" ? smallest_constant_dt_pwl(imp, lo, hi, opts.pwl_n, sopts)
                                                  : smallest_constant_dt(imp, lo, hi, sopts);
            out["result"] = search_to_json(res);
            out["found"] = true;
            if (scan_T && !res.scan_T.empty()) {
                *scan_T = res.scan_T;
                *scan_rho = res.scan_value;
            }
        } else if (target == "smallest_minimum_dt") {
            const double lo = task.value("range", json::array({0.05, 8.0}))[0].get<double>();
            const double hi = task.value("range", json::array({0.05, 8.0}))[1].get<double>();
            SearchResult res = smallest_minimum_dt(imp, lo, hi, parse_mode(opts.mode, "exact"), sopts);
            out["result"] = search_to_json(res);
            out["found"] = true;
        } else if (target == "largest_ranged_tmax") {
            const double tmin = task.at("T_min").get<double>();
            const double hi = task.value("range", json::array({tmin, 2.0}))[1].get<double>();
            SearchResult res = largest_ranged_tmax(imp, tmin, hi, parse_mode(opts.mode, "lifted"), sopts);
            out["result"] = search_to_json(res);
            out["found"] = !res.empty_interval;
        } else if (target == "decay_rate") {
            const double T = task.at("T").get<double>();
            out["result"] = {{"alpha", decay_rate(imp, T)}, {"T", T}};
            out["found"] = true;
        } else {
            throw ConfigError("task.target", "unknown search target '" + target + "'");
        }
    } catch (const NumericalError& e) {
        const std::string what = e.what();
        if (what.find("no threshold in range") != std::string::npos ||
            what.find("no certificate in range") != std::string::npos ||
            what.find("flow not mean-square stable") != std::string::npos ||
            what.find("unstable at constant dwell-time") != std::string::npos) {
            out["found"] = false;
            out["reason"] = what;
        } else {
            throw;
        }
    }
    return out;
}

json synthesize_task(const json& config, const RunOptions& opts) {
    const AnySystem asys = system_from_json(config.at("system"), "system");
    const json& task = config.at("task");
    const DwellTimeSpec dwell = dwell_from_json(task.at("dwell"), "task.dwell");
    SynthesisOptions sopts;
    sopts.segments = task.value("N", 12);
    sopts.eps = opts.eps;

    SynthesisResult res;
    if (const auto* sd = std::get_if<SampledDataSystem>(&asys)) {
        const auto* r = std::get_if<RangedDwell>(&dwell);
        if (!r) throw ConfigError("task.dwell.type", "sampled-data synthesis expects a ranged dwell-time");
        res = sampled_data_sf(*sd, r->T_min, r->T_max, sopts.segments, sopts);
    } else if (const auto* imp = std::get_if<ImpulsiveSystem>(&asys)) {
        if (const auto* r = std::get_if<RangedDwell>(&dwell))
            res = ranged_sf(*imp, r->T_min, r->T_max, sopts.segments, sopts);
        else if (const auto* m = std::get_if<MinimumDwell>(&dwell))
            res = min_dt_sf(*imp, m->T, sopts.segments, sopts);
        else
            throw ConfigError("task.dwell.type", "synthesis expects a ranged or minimum dwell-time");
    } else {
        throw ConfigError("system.type", "synthesis expects an impulsive or sampled-data system");
    }
    json out;
    out["synthesis"] = synthesis_to_json(res);
    out["verdict"] = res.feasible && res.verified;
    return out;
}

json simulate_task(const json& config, const RunOptions& opts, SimResult* result_out) {
    const AnySystem asys = system_from_json(config.at("system"), "system");
    const json& task = config.at("task");

    SimSpec spec;
    if (const auto* sd = std::get_if<SampledDataSystem>(&asys))
        spec.system = sampled_data_to_impulsive(*sd);
    else if (const auto* imp = std::get_if<ImpulsiveSystem>(&asys))
        spec.system = *imp;
    else
        throw ConfigError("system.type", "simulation expects an impulsive or sampled-data system");

    const double horizon = task.value("horizon", 10.0);
    ScheduleSpec sched;
    const json& js = task.at("schedule");
    const std::string kind = js.value("type", "constant");
    if (kind == "constant") {
        sched.kind = ScheduleSpec::Kind::Constant;
        sched.T = js.at("T").get<double>();
    } else if (kind == "uniform") {
        sched.kind = ScheduleSpec::Kind::Uniform;
        sched.T_min = js.at("T_min").get<double>();
        sched.T_max = js.at("T_max").get<double>();
    } else if (kind == "min_dwell") {
        sched.kind = ScheduleSpec::Kind::MinDwell;
        sched.T = js.at("T").get<double>();
        sched.excess_scale = js.value("excess_scale", 0.0);
    } else {
        throw ConfigError("task.schedule.type", "expected constant|uniform|min_dwell");
    }
    spec.schedule = generate_schedule(sched, horizon, opts.seed);

    if (!task.contains("x0") || !task["x0"].is_array()) throw ConfigError("task.x0", "expected an array");
    for (const auto& v : task["x0"]) spec.x0.push_back(v.get<double>());
    spec.paths = opts.paths;
    spec.seed = opts.seed;
    spec.threads = opts.threads;
    spec.step = task.value("step", 0.0);

    SimResult res = simulate(spec);
    json out;
    out["grid_points"] = res.grid.size();
    out["mean_sq_initial"] = res.mean_sq.front();
    out["mean_sq_final"] = res.mean_sq.back();
    out["flagged_paths"] = res.flagged_paths;
    out["impulses"] = spec.schedule.times.size();
    if (sched.kind == ScheduleSpec::Kind::Constant) {
        auto rep = moment_check(spec, res);
        out["moment_check"] = {{"max_abs_z", rep.max_abs_z}, {"post_jump_moments", rep.post_jump_moments}};
    }
    if (result_out) *result_out = res;
    return out;
}

json convert_task(const json& config) {
    const AnySystem asys = system_from_json(config.at("system"), "system");
    json out;
    if (const auto* sw = std::get_if<SwitchedSystem>(&asys)) {
        auto mj = switched_to_impulsive(*sw);
        out["state_dimension"] = mj.n();
        out["A"] = mat_to_json(mj.A);
        out["E_c"] = mat_to_json(mj.Ec[0]);
        json jumps = json::array();
        for (const auto& [jm, ed] : mj.jumps) jumps.push_back({{"J", mat_to_json(jm)}, {"E_d", mat_to_json(ed)}});
        out["jumps"] = jumps;
    } else if (const auto* sd = std::get_if<SampledDataSystem>(&asys)) {
        auto imp = sampled_data_to_impulsive(*sd);
        out["system"] = system_to_json(AnySystem{imp});
    } else {
        out["system"] = system_to_json(asys);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text, std::vector<std::string>& files) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
    files.push_back(path);
}

} // namespace

json reproduce_table(const std::string& table_id, const RunOptions& opts) {
    json out;
    out["table"] = table_id;
    json cells = json::array();
    double max_dev = 0.0;

    auto push_cell = [&](json cell, double dev, bool excluded) {
        cell["deviation"] = dev;
        if (excluded) cell["excluded"] = true;
        cells.push_back(std::move(cell));
        if (!excluded) max_dev = std::max(max_dev, std::abs(dev));
    };

    if (table_id == "T1" || table_id == "T2" || table_id == "T3") {
        const auto& ref = table_id == "T1" ? bench::table_t1()
                                           : (table_id == "T2" ? bench::table_t2() : bench::table_t3());
        SearchOptions sopts;
        sopts.tol = table_id == "T2" ? 1e-5 : 1e-4;
        sopts.threads = opts.threads;
        sopts.pwl_segments = opts.pwl_n;
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double kappa = bench::kTableKappa[i], delta = bench::kTableDelta[j];
                auto sys = bench::stable_flow_expanding_jump(kappa, delta);
                double computed = 0.0;
                if (table_id == "T2") {
                    computed = smallest_constant_dt(sys, 0.2, 6.5, sopts).threshold;
                } else if (table_id == "T3") {
                    computed = smallest_minimum_dt(sys, 0.3, 8.0, CertMode::Exact, sopts).threshold;
                } else {
                    computed = smallest_constant_dt_pwl(sys, 0.2, 6.5, opts.pwl_n, sopts).threshold;
                }
                push_cell({{"kappa", kappa}, {"delta", delta}, {"reference", ref[i][j]}, {"computed", computed}},
                          computed - ref[i][j], false);
            }
        }
        out["settings"] = {{"tol", sopts.tol}, {"pwl_n", table_id == "T1" ? opts.pwl_n : 0}};
    } else if (table_id == "T4") {
        const auto& ref = bench::table_t4();
        SearchOptions sopts;
        sopts.tol = 1e-4;
        sopts.grid_points = opts.grid_n;
        sopts.threads = opts.threads;
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double kappa = bench::kRangedKappa[i], delta = bench::kRangedDelta[j];
                auto sys = bench::unstable_flow_contracting_jump(kappa, delta);
                auto res = largest_ranged_tmax(sys, 0.01, 0.6, CertMode::Lifted, sopts);
                const bool excluded = (i == 4 && j == 4); // unreliable reference cell
                push_cell({{"kappa", kappa}, {"delta", delta}, {"reference", ref[i][j]},
                           {"computed", res.threshold}},
                          res.threshold - ref[i][j], excluded);
            }
        }
        out["settings"] = {{"tol", sopts.tol}, {"grid_n", sopts.grid_points}, {"T_min", 0.01}};
    } else if (table_id == "T5") {
        auto sd = bench::sampled_data_benchmark();
        SynthesisOptions sopts;
        sopts.segments = 12;
        bool all_verified = true;
        for (const auto& w : bench::table_t5_windows()) {
            auto res = sampled_data_sf(sd, w.T_min, w.T_max, sopts.segments, sopts);
            json cell = {{"T_min", w.T_min},
                         {"T_max", w.T_max},
                         {"feasible", res.feasible},
                         {"verified", res.verified},
                         {"closed_loop_rho", res.closed_loop_rho}};
            if (res.feasible) cell["K_d"] = mat_to_json(res.gains.Kd);
            cells.push_back(std::move(cell));
            all_verified = all_verified && res.feasible && res.verified;
        }
        out["all_verified"] = all_verified;
        out["settings"] = {{"N", sopts.segments}};
    } else {
        throw ConfigError("task.table", "expected T1|T2|T3|T4|T5, got '" + table_id + "'");
    }
    out["cells"] = cells;
    if (table_id != "T5") out["max_abs_deviation"] = max_dev;
    return out;
}

RunOutcome run_task(const std::string& command, const json& config, const RunOptions& opts,
                    const std::string& out_dir) {
    RunOutcome outcome;
    json report;
    report["schema_version"] = 1;
    report["command"] = command;
    report["settings"] = settings_json(opts);
    if (config.contains("task")) report["task"] = config["task"];

    if (opts.threads > 0) omp_set_num_threads(opts.threads);

    try {
        std::vector<double> scan_T, scan_rho;
        SimResult sim_result;
        if (command == "analyze") {
            report["result"] = analyze_task(config, opts);
            outcome.exit_code = report["result"]["verdict"].get<bool>() ? 0 : 1;
        } else if (command == "search") {
            report["result"] = search_task(config, opts, &scan_T, &scan_rho);
            outcome.exit_code = report["result"]["found"].get<bool>() ? 0 : 1;
        } else if (command == "synthesize") {
            report["result"] = synthesize_task(config, opts);
            outcome.exit_code = report["result"]["verdict"].get<bool>() ? 0 : 1;
        } else if (command == "simulate") {
            report["result"] = simulate_task(config, opts, &sim_result);
            outcome.exit_code = 0;
        } else if (command == "convert") {
            report["result"] = convert_task(config);
            outcome.exit_code = 0;
        } else if (command == "reproduce") {
            std::string table = opts.table;
            if (table.empty() && config.contains("task")) table = config["task"].value("table", "");
            report["result"] = reproduce_table(table, opts);
            outcome.exit_code = 0;
        } else {
            throw ConfigError("command", "unknown command '" + command + "'");
        }

        if (!out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (!scan_T.empty()) {
                std::ostringstream csv;
                csv << "T,rho\n";
                for (size_t i = 0; i < scan_T.size(); ++i) csv << scan_T[i] << "," << scan_rho[i] << "\n";
                write_text(out_dir + "/scan.csv", csv.str(), outcome.files_written);
            }
            if (command == "simulate") {
                std::ostringstream csv;
                csv << "time,mean_sq,std_err\n";
                for (size_t i = 0; i < sim_result.grid.size(); ++i)
                    csv << sim_result.grid[i] << "," << sim_result.mean_sq[i] << "," << sim_result.std_err[i]
                        << "\n";
                write_text(out_dir + "/trajectory.csv", csv.str(), outcome.files_written);
            }
        }
    } catch (const ConfigError& e) {
        report["error"] = {{"kind", "config"}, {"path", e.path()}, {"message", e.what()}};
        outcome.exit_code = 2;
    } catch (const json::exception& e) {
        report["error"] = {{"kind", "config"}, {"message", e.what()}};
        outcome.exit_code = 2;
    } catch (const std::invalid_argument& e) {
        report["error"] = {{"kind", "config"}, {"message", e.what()}};
        outcome.exit_code = 2;
    } catch (const NumericalError& e) {
        report["error"] = {{"kind", "numerical"}, {"message", e.what()}};
        outcome.exit_code = 3;
    }

    outcome.report = std::move(report);
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        std::ofstream os(out_dir + "/report.json", std::ios::binary);
        if (!os) {
            std::fprintf(stderr, "warning: cannot write %s/report.json\n", out_dir.c_str());
        } else {
            os << outcome.report.dump(2) << "\n";
            outcome.files_written.push_back(out_dir + "/report.json");
        }
    }
    return outcome;
}

RunOutcome run_config_file(const std::string& command, const std::string& config_path, const RunOptions& opts,
                           const std::string& out_dir) {
    std::ifstream is(config_path);
    if (!is) {
        RunOutcome out;
        out.exit_code = 2;
        out.report = {{"error", {{"kind", "config"}, {"message", "cannot read config " + config_path}}}};
        return out;
    }
    json config;
    try {
        is >> config;
    } catch (const json::exception& e) {
        RunOutcome out;
        out.exit_code = 2;
        out.report = {{"error", {{"kind", "config"}, {"message", e.what()}}}};
        return out;
    }
    return run_task(command, config, opts, out_dir);
}

} // namespace msstab
