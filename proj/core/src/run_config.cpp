#include "epred/run_config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace epred {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

Eigen::Vector3d parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Eigen::VectorXd parse_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

ThetaSchedule parse_schedule(const json& j, const std::string& where) {
    require_keys(j, where, {"kind", "theta0", "omega", "eps", "freq"});
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return ThetaSchedule::constant(j.value("theta0", 0.0));
    if (kind == "linear") return ThetaSchedule::linear(j.value("omega", 1.0));
    if (kind == "sinusoidal")
        return ThetaSchedule::sinusoidal(j.value("eps", 0.3), j.value("freq", 1.0));
    throw ConfigError(where + ": unknown schedule kind '" + kind + "'");
}

HPathSpec parse_h_path(const json& j, const std::string& where) {
    require_keys(j, where, {"family", "theta", "axis"});
    HPathSpec spec;
    spec.family = j.at("family").get<std::string>();
    if (spec.family != "rotation_s1" && spec.family != "so3" && spec.family != "const_gauge")
        throw ConfigError(where + ": unknown h_path family '" + spec.family + "'");
    spec.schedule = parse_schedule(j.at("theta"), where + ".theta");
    if (j.contains("axis")) spec.axis = parse_vec3(j.at("axis"), where + ".axis");
    return spec;
}

const std::set<std::string> kCheckNames = {
    "lagrangian_invariance", "derivative_equivariance", "residual_equivariance",
    "solution_transport",    "reference_match",         "conservation"};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(doc, "config", {"system", "params", "time", "init", "verify", "output"});
    RunConfig cfg;
    if (!doc.contains("system")) throw ConfigError("config: missing 'system'");
    cfg.system = doc.at("system").get<std::string>();

    if (doc.contains("params")) {
        const json& p = doc.at("params");
        require_keys(p, "params",
                     {"I", "lambda", "j", "lambda_nem", "k", "N", "rho_min", "spin_ell",
                      "sigma"});
        if (p.contains("I")) cfg.params.inertia = parse_vec3(p.at("I"), "params.I");
        if (p.contains("lambda"))
            cfg.params.lambda_vec = parse_vec3(p.at("lambda"), "params.lambda");
        if (p.contains("j")) cfg.params.j = p.at("j").get<double>();
        if (p.contains("lambda_nem")) cfg.params.lambda_nem = p.at("lambda_nem").get<double>();
        if (p.contains("k")) cfg.params.k_axis = parse_vec3(p.at("k"), "params.k");
        if (p.contains("N")) cfg.params.grid_size = p.at("N").get<int>();
        if (p.contains("rho_min")) cfg.params.rho_min = p.at("rho_min").get<double>();
        if (p.contains("spin_ell")) cfg.params.spin_ell = p.at("spin_ell").get<int>();
        if (p.contains("sigma")) cfg.params.sigma = p.at("sigma").get<double>();
    }

    if (doc.contains("time")) {
        const json& t = doc.at("time");
        require_keys(t, "time", {"T", "dt"});
        if (!t.contains("T") || !t.contains("dt"))
            throw ConfigError("time: both 'T' and 'dt' are required");
        cfg.time_T = t.at("T").get<double>();
        cfg.time_dt = t.at("dt").get<double>();
        if (!(*cfg.time_dt > 0) || !(*cfg.time_T > 0))
            throw ConfigError("time: T and dt must be positive");
        if (!(*cfg.time_dt < *cfg.time_T)) throw ConfigError("time: dt must be less than T");
    }

    if (doc.contains("init")) {
        const json& init = doc.at("init");
        if (init.is_string()) {
            cfg.init_preset = init.get<std::string>();
            if (cfg.init_preset != "default")
                throw ConfigError("init: unknown preset '" + cfg.init_preset + "'");
        } else {
            require_keys(init, "init", {"xi", "a"});
            if (!init.contains("xi")) throw ConfigError("init: missing 'xi'");
            cfg.init_preset.clear();
            cfg.init_xi = parse_vector(init.at("xi"), "init.xi");
            if (init.contains("a")) cfg.init_a = parse_vector(init.at("a"), "init.a");
        }
    }

    if (doc.contains("verify")) {
        const json& v = doc.at("verify");
        require_keys(v, "verify", {"seed", "checks"});
        if (v.contains("seed")) cfg.seed = v.at("seed").get<std::uint64_t>();
        if (!v.contains("checks") || !v.at("checks").is_array() || v.at("checks").empty())
            throw ConfigError("verify: non-empty 'checks' array required");
        for (const auto& c : v.at("checks")) {
            require_keys(c, "verify.checks[]", {"check", "h_path", "expect_fail"});
            CheckSpec spec;
            spec.check = c.at("check").get<std::string>();
            if (!kCheckNames.count(spec.check))
                throw ConfigError("verify: unknown check '" + spec.check + "'");
            if (c.contains("h_path"))
                spec.h_path = parse_h_path(c.at("h_path"), "verify.checks[].h_path");
            if (c.contains("expect_fail")) spec.expect_fail = c.at("expect_fail").get<bool>();
            cfg.checks.push_back(std::move(spec));
        }
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        require_keys(o, "output", {"dir", "trajectory_format", "report"});
        if (o.contains("dir")) cfg.output.dir = o.at("dir").get<std::string>();
        if (o.contains("trajectory_format"))
            cfg.output.trajectory_format = o.at("trajectory_format").get<std::string>();
        if (cfg.output.trajectory_format != "csv" && cfg.output.trajectory_format != "json")
            throw ConfigError("output: trajectory_format must be 'csv' or 'json'");
        if (o.contains("report")) cfg.output.report = o.at("report").get<std::string>();
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

HPath make_h_path(const SystemBundle& system, const HPathSpec& spec) {
    if (spec.family == "rotation_s1") {
        if (system.algebra.kind() != AlgebraKind::VectS1)
            throw ConfigError("h_path: rotation_s1 needs a VectS1 system");
        return HPath::rotation_s1(system.algebra, spec.schedule);
    }
    if (spec.family == "so3") {
        if (system.algebra.kind() != AlgebraKind::So3)
            throw ConfigError("h_path: so3 needs an So3 system");
        return HPath::so3(spec.axis, spec.schedule);
    }
    if (system.algebra.kind() != AlgebraKind::GaugeSo3)
        throw ConfigError("h_path: const_gauge needs a GaugeSo3 system");
    return HPath::const_gauge(system.algebra, spec.axis, spec.schedule);
}

// ---------------------------------------------------------------------------
// cmd_run

namespace {

struct InitPair {
    AlgElem xi;
    std::optional<AdvectedState> a;
};

InitPair resolve_init(const RunConfig& cfg, const SystemBundle& system) {
    if (!cfg.init_xi) return {system.default_xi0(), system.default_a0()};
    if (cfg.init_xi->size() != system.algebra.dim())
        throw ConfigError("init.xi: wrong length for system " + system.name);
    AlgElem xi{system.algebra, *cfg.init_xi};
    std::optional<AdvectedState> a;
    if (system.action) {
        if (!cfg.init_a) throw ConfigError("init: system requires 'a'");
        a = AdvectedState{*system.action, *cfg.init_a};
    } else if (cfg.init_a) {
        throw ConfigError("init: system has no advected parameter");
    }
    return {std::move(xi), std::move(a)};
}

std::vector<std::string> trajectory_columns(const SystemBundle& system) {
    std::vector<std::string> cols{"t"};
    auto lattice_cols = [&](const std::string& base, int n, bool vec3) {
        for (int j = 0; j < n; ++j) {
            if (vec3) {
                for (const char* c : {"x", "y", "z"})
                    cols.push_back(base + std::to_string(j) + "_" + c);
            } else {
                cols.push_back(base + std::to_string(j));
            }
        }
    };
    if (system.name == "heavy_top") {
        for (int i = 1; i <= 3; ++i) cols.push_back("mu_" + std::to_string(i));
        for (int i = 1; i <= 3; ++i) cols.push_back("omega_" + std::to_string(i));
        for (int i = 1; i <= 3; ++i) cols.push_back("gamma_" + std::to_string(i));
    } else if (system.name == "nematic" || system.name == "nematic_projected") {
        for (int i = 1; i <= 3; ++i) cols.push_back("mu_" + std::to_string(i));
        for (int i = 1; i <= 3; ++i) cols.push_back("xi_" + std::to_string(i));
        for (int i = 1; i <= 3; ++i) cols.push_back("m_" + std::to_string(i));
    } else if (system.name == "hs1d") {
        lattice_cols("mu_", system.params.grid_size, false);
        lattice_cols("u_", system.params.grid_size, false);
    } else if (system.name == "density_hs1d") {
        lattice_cols("mu_", system.params.grid_size, false);
        lattice_cols("u_", system.params.grid_size, false);
        lattice_cols("rho_", system.params.grid_size, false);
    } else {
        lattice_cols("mu_", system.params.grid_size, true);
        lattice_cols("xi_", system.params.grid_size, true);
        lattice_cols("gamma_", system.params.grid_size, true);
    }
    return cols;
}

Eigen::VectorXd trajectory_row(const Trajectory& traj, size_t i) {
    const EPState& s = traj.states[i];
    const int dim = static_cast<int>(s.mu.coords.size());
    const int adim = s.a ? static_cast<int>(s.a->value.size()) : 0;
    Eigen::VectorXd row(1 + 2 * dim + adim);
    row[0] = s.t;
    row.segment(1, dim) = s.mu.coords;
    row.segment(1 + dim, dim) = traj.xi[i].coords;
    if (adim > 0) row.tail(adim) = s.a->value;
    return row;
}

} // namespace

int cmd_run(const RunConfig& cfg) {
    if (!cfg.time_T || !cfg.time_dt) throw ConfigError("run: config requires a 'time' section");
    const SystemBundle system = build_system(cfg.system, cfg.params);
    const InitPair init = resolve_init(cfg, system);

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(system, init.xi, init.a, *cfg.time_T, *cfg.time_dt);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(cfg.output.dir);
    const auto columns = trajectory_columns(system);
    const std::filesystem::path traj_path =
        std::filesystem::path(cfg.output.dir) /
        ("trajectory." + cfg.output.trajectory_format);

    if (cfg.output.trajectory_format == "csv") {
        std::ofstream out(traj_path);
        for (size_t c = 0; c < columns.size(); ++c)
            out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
        for (size_t i = 0; i < traj.states.size(); ++i) {
            const Eigen::VectorXd row = trajectory_row(traj, i);
            for (int c = 0; c < row.size(); ++c)
                out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
        }
    } else {
        ordered_json jt;
        jt["columns"] = columns;
        std::vector<std::vector<double>> rows;
        rows.reserve(traj.states.size());
        for (size_t i = 0; i < traj.states.size(); ++i) {
            const Eigen::VectorXd row = trajectory_row(traj, i);
            rows.emplace_back(row.data(), row.data() + row.size());
        }
        jt["rows"] = rows;
        std::ofstream out(traj_path);
        out << jt.dump(2) << "\n";
    }

    // conserved-quantity drifts along the run
    const auto q0 = conserved_quantities(system, traj.states.front());
    std::map<std::string, double> drift;
    const int stride = std::max<size_t>(1, traj.states.size() / 256);
    for (size_t i = 1; i < traj.states.size(); i += stride) {
        const auto q = conserved_quantities(system, traj.states[i]);
        for (const auto& [name, value] : q)
            drift[name] = std::max(drift[name], std::abs(value - q0.at(name)));
    }

    ordered_json summary;
    summary["system"] = system.name;
    summary["T"] = *cfg.time_T;
    summary["dt"] = *cfg.time_dt;
    summary["steps"] = static_cast<int>(traj.states.size()) - 1;
    ordered_json jd;
    for (const auto& [name, d] : drift) {
        jd[name] = {{"initial", q0.at(name)},
                    {"max_abs_drift", d},
                    {"max_rel_drift", d / std::max(1e-12, std::abs(q0.at(name)))}};
    }
    summary["conserved"] = jd;
    const EPState& last = traj.states.back();
    summary["final_state"] = ordered_json::object();
    summary["final_state"]["t"] = last.t;
    summary["final_state"]["mu"] =
        std::vector<double>(last.mu.coords.data(), last.mu.coords.data() + last.mu.coords.size());
    summary["final_state"]["xi"] = std::vector<double>(
        traj.xi.back().coords.data(), traj.xi.back().coords.data() + traj.xi.back().coords.size());
    if (last.a)
        summary["final_state"]["a"] =
            std::vector<double>(last.a->value.data(), last.a->value.data() + last.a->value.size());
    summary["wall_time_s"] = wall;
    std::ofstream out(std::filesystem::path(cfg.output.dir) / "summary.json");
    out << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// cmd_verify

namespace {

std::pair<double, double> default_horizon(const SystemBundle& system) {
    // ODE systems run T = 10, lattice PDE systems T = 1, both at dt = 1e-3
    const bool lattice = system.algebra.kind() != AlgebraKind::So3;
    return {lattice ? 1.0 : 10.0, 1e-3};
}

CheckReport run_one_check(const RunConfig& cfg, const SystemBundle& system,
                          const CheckSpec& spec, const HPath* path) {
    CheckOptions opts;
    opts.seed = cfg.seed;
    const auto [T_def, dt_def] = default_horizon(system);
    const double T = cfg.time_T.value_or(T_def);
    const double dt = cfg.time_dt.value_or(dt_def);

    if (spec.check == "lagrangian_invariance")
        return check_lagrangian_invariance(system, *path, opts);
    if (spec.check == "derivative_equivariance")
        return check_derivative_equivariance(system, *path, opts);
    if (spec.check == "residual_equivariance")
        return check_residual_equivariance(system, *path, opts);
    if (spec.check == "solution_transport")
        return check_solution_transport(system, *path, T, dt, opts);
    if (spec.check == "reference_match") return check_reference_match(system, opts);
    return check_conservation(system, T, dt, opts);
}

} // namespace

int cmd_verify(const RunConfig& cfg) {
    if (cfg.checks.empty()) throw ConfigError("verify: config requires a 'verify' section");
    const SystemBundle system = build_system(cfg.system, cfg.params);

    ordered_json report;
    report["system"] = system.name;
    report["seed"] = cfg.seed;
    report["checks"] = ordered_json::array();
    bool all_ok = true;

    for (const auto& spec : cfg.checks) {
        const bool needs_path = spec.check == "lagrangian_invariance" ||
                                spec.check == "derivative_equivariance" ||
                                spec.check == "residual_equivariance" ||
                                spec.check == "solution_transport";
        std::vector<std::pair<std::string, CheckReport>> results;
        if (!needs_path) {
            results.emplace_back("", run_one_check(cfg, system, spec, nullptr));
        } else if (spec.h_path) {
            const HPath path = make_h_path(system, *spec.h_path);
            results.emplace_back(path.name(), run_one_check(cfg, system, spec, &path));
        } else {
            if (system.h_paths.empty())
                throw ConfigError("verify: system declares no H-path catalog");
            for (const HPath& path : system.h_paths)
                results.emplace_back(path.name(), run_one_check(cfg, system, spec, &path));
        }
        for (auto& [path_name, rep] : results) {
            const bool ok = spec.expect_fail ? !rep.pass : rep.pass;
            all_ok = all_ok && ok;
            ordered_json jc;
            jc["name"] = rep.name;
            jc["detail"] = rep.detail;
            if (!path_name.empty()) jc["h_path"] = path_name;
            jc["max_defect"] = rep.max_defect;
            jc["tolerance"] = rep.tolerance;
            jc["pass"] = rep.pass;
            if (spec.expect_fail) jc["expected_fail"] = true;
            if (!rep.worst.empty()) jc["worst"] = rep.worst;
            report["checks"].push_back(std::move(jc));
        }
    }
    report["all_pass"] = all_ok;

    std::filesystem::create_directories(cfg.output.dir);
    std::ofstream out(std::filesystem::path(cfg.output.dir) / cfg.output.report);
    out << report.dump(2) << "\n";
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// cmd_sweep

namespace {

int sweep_thread_cap() {
    if (const char* env = std::getenv("EPRED_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 2;
}

struct SweepRun {
    Eigen::VectorXd xi_final;
    Eigen::VectorXd packed_final;
    int grid_size = 0;
};

SweepRun sweep_single(const RunConfig& cfg, const std::string& param, double value) {
    RunConfig local = cfg;
    if (param == "dt") {
        local.time_dt = value;
    } else {
        const int n = static_cast<int>(std::llround(value));
        if (std::abs(value - n) > 1e-9) throw ConfigError("sweep: N values must be integers");
        local.params.grid_size = n;
        if (local.init_xi) throw ConfigError("sweep: inline init is incompatible with an N sweep");
    }
    const SystemBundle system = build_system(local.system, local.params);
    const InitPair init = resolve_init(local, system);
    const Trajectory traj =
        integrate(system, init.xi, init.a, *local.time_T, *local.time_dt);
    SweepRun run;
    run.xi_final = traj.xi.back().coords;
    const EPState& last = traj.states.back();
    const int dim = static_cast<int>(last.mu.coords.size());
    const int adim = last.a ? static_cast<int>(last.a->value.size()) : 0;
    run.packed_final.resize(dim + adim);
    run.packed_final.head(dim) = last.mu.coords;
    if (adim > 0) run.packed_final.tail(adim) = last.a->value;
    run.grid_size = system.params.grid_size;
    return run;
}

double sweep_error(const std::string& param, const SweepRun& run, const SweepRun& finest) {
    if (param == "dt")
        return (run.packed_final - finest.packed_final).cwiseAbs().maxCoeff();
    // N sweep: compare the reconstructed field at shared grid nodes
    if (finest.grid_size % run.grid_size != 0)
        throw ConfigError("sweep: every N must divide the finest N");
    const int stride = finest.grid_size / run.grid_size;
    const int comps = static_cast<int>(run.xi_final.size()) / run.grid_size;
    double err = 0.0;
    for (int j = 0; j < run.grid_size; ++j)
        for (int c = 0; c < comps; ++c)
            err = std::max(err, std::abs(run.xi_final[comps * j + c] -
                                         finest.xi_final[comps * (j * stride) + c]));
    return err;
}

} // namespace

int cmd_sweep(const RunConfig& cfg, const std::string& param,
              const std::vector<double>& values) {
    if (param != "dt" && param != "N") throw ConfigError("sweep: param must be 'dt' or 'N'");
    if (values.size() < 3) throw ConfigError("sweep: at least 3 values required");
    const bool increasing = values[1] > values[0];
    for (size_t i = 1; i < values.size(); ++i) {
        const bool step_up = values[i] > values[i - 1];
        if (values[i] != values[i - 1] && step_up != increasing)
            throw ConfigError("sweep: values must be monotone");
    }
    if (!cfg.time_T || !cfg.time_dt) throw ConfigError("sweep: config requires a 'time' section");

    std::vector<SweepRun> runs(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    const int cap = sweep_thread_cap();
    for (size_t base = 0; base < values.size(); base += cap) {
        std::vector<std::thread> pool;
        const size_t end = std::min(values.size(), base + cap);
        for (size_t i = base; i < end; ++i) {
            pool.emplace_back([&, i] {
                try {
                    runs[i] = sweep_single(cfg, param, values[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // step size that drives the error: dt itself, or the grid spacing 1/N
    auto step_of = [&](double v) { return param == "dt" ? v : 1.0 / v; };
    const SweepRun& finest = runs.back();
    std::vector<double> errs(values.size(), 0.0);
    for (size_t i = 0; i + 1 < values.size(); ++i)
        errs[i] = sweep_error(param, runs[i], finest);

    ordered_json table = ordered_json::array();
    for (size_t i = 0; i < values.size(); ++i) {
        ordered_json row;
        row["value"] = values[i];
        row["error"] = errs[i];
        // observed order from successive error ratios; the pair touching the
        // finest run (self-comparison) is degenerate
        if (i + 2 < values.size() && errs[i] > 0 && errs[i + 1] > 0 &&
            step_of(values[i]) != step_of(values[i + 1])) {
            row["p"] = std::log(errs[i] / errs[i + 1]) /
                       std::log(step_of(values[i]) / step_of(values[i + 1]));
        } else {
            row["p"] = nullptr;
        }
        table.push_back(std::move(row));
    }

    ordered_json report;
    report["system"] = cfg.system;
    report["param"] = param;
    report["observable"] =
        param == "dt" ? "final_packed_state_sup_error" : "final_xi_shared_nodes_sup_error";
    report["entries"] = std::move(table);

    std::filesystem::create_directories(cfg.output.dir);
    std::ofstream out(std::filesystem::path(cfg.output.dir) / ("sweep_" + param + ".json"));
    out << report.dump(2) << "\n";
    return 0;
}

} // namespace epred
