#include "pemsim/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "pemsim/analysis.hpp"
#include "pemsim/config.hpp"
#include "pemsim/netlist.hpp"
#include "pemsim/pem.hpp"
#include "pemsim/version.hpp"

namespace pemsim {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json plate_json(const PlateParams& p) {
    return {{"rho", p.rho}, {"E", p.E}, {"h", p.h}, {"a", p.a}, {"l0", p.l0}, {"t0", p.t0}};
}

json actuator_json(const ActuatorParams& a) {
    return {{"g_mm", a.g_mm}, {"g_12", a.g_12}, {"g_em", a.g_em}, {"g_ee", a.g_ee}, {"b", a.b}};
}

void write_manifest(const fs::path& out_dir, const std::string& command, const LoadedConfig& lc,
                    const json& options, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(lc.raw));
    m["tool_version"] = kToolVersion;
    m["options"] = options;
    m["outputs"] = outputs;
    m["plate"] = plate_json(lc.config.plate);
    m["actuator"] = actuator_json(lc.config.actuator);
    m["grid"] = {{"n", lc.config.grid_n}, {"bc", to_string(lc.config.bc)}};
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> header) : columns(std::move(header)) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            os << (i ? "," : "") << columns[i];
        }
        os << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            os << (i ? "," : "") << fmt(values[i]);
        }
        os << "\n";
    }
    std::vector<std::string> columns;
    std::ostringstream os;
};

Mode make_mode(int m, int n, bool discrete, const GridSpec& grid) {
    return discrete ? Mode::discrete(m, n, grid) : Mode::continuous(m, n);
}

double shunt_gamma(const DimensionlessGroups& groups, double R) {
    return R > 0.0 ? derive_gamma(groups, R) : 0.0;
}

int cmd_synth(const LoadedConfig& lc, const fs::path& out_dir, bool expand) {
    const RunConfig& cfg = lc.config;
    const GridSpec grid(cfg.grid_n);
    const AlphaBeta ab = derive_alpha_beta(cfg.plate, cfg.actuator);
    // With the actuators acting as the ground capacitors, C = g_ee pins the
    // characteristic resistance; otherwise R0 comes from the config.
    const double R0 =
        cfg.use_actuator_capacitance ? cfg.plate.t0 / cfg.actuator.g_ee : cfg.R0;
    const AnalogElementValues values =
        identify_edge_admittances(grid.eps, ab.alpha, R0, cfg.plate.t0);

    const Netlist plain = build_netlist(values, grid, cfg.bc, false);
    const SparseOperator biharmonic = assemble_biharmonic(grid, cfg.bc);
    const AnalogVerification ver = verify_analog(plain, biharmonic, ab.alpha);

    const Netlist& emitted = expand ? build_netlist(values, grid, cfg.bc, true) : plain;

    json gic_checks = json::array();
    bool gic_ok = true;
    if (expand) {
        for (const auto& [name, gic] : emitted.subcircuits) {
            // recover the inductance this sub-circuit must realize
            double target = 0.0;
            for (const auto& c : emitted.components) {
                if (c.kind == ComponentKind::Subcircuit && c.label.rfind(name + " ", 0) == 0) {
                    target = c.value;
                    break;
                }
            }
            const ImpedanceResult z = verify_gic(gic);
            const bool ok = z.inductive &&
                            std::abs(z.equivalent_inductance - target) <= 1e-9 * std::abs(target);
            gic_ok = gic_ok && ok;
            gic_checks.push_back({{"name", name},
                                  {"z_in", z.z_in.str()},
                                  {"equivalent_inductance", z.equivalent_inductance},
                                  {"target_inductance", target},
                                  {"ok", ok}});
        }
    }

    json report;
    report["alpha"] = ab.alpha;
    report["beta"] = ab.beta;
    report["eps"] = grid.eps;
    report["R0"] = R0;
    report["actuator_supplies_C"] = cfg.use_actuator_capacitance;
    report["t0"] = cfg.plate.t0;
    report["element_values"] = {{"L_axial", values.L_axial},
                                {"L_diag", values.L_diag},
                                {"L_second", values.L_second},
                                {"C_ground", values.C_ground}};
    report["verification"] = {{"max_mismatch", ver.max_mismatch},
                              {"inductive_mismatch", ver.inductive_mismatch},
                              {"capacitive_mismatch", ver.capacitive_mismatch},
                              {"worst_row", ver.worst_row},
                              {"threshold", 1e-9}};
    report["expanded"] = expand;
    report["gic"] = gic_checks;
    report["component_count"] = emitted.components.size();

    fs::create_directories(out_dir);
    write_text(out_dir / "netlist.cir", emitted.to_spice());
    write_text(out_dir / "synth_report.json", report.dump(2) + "\n");
    {
        std::ostringstream coord;
        biharmonic.write_coordinate(coord);
        write_text(out_dir / "biharmonic.coord", coord.str());
    }
    write_manifest(out_dir, "synth", lc, {{"expand_negatives", expand}},
                   {"netlist.cir", "synth_report.json", "biharmonic.coord"});

    const bool ok = ver.max_mismatch <= 1e-9 && gic_ok;
    std::cout << "synth: max coefficient mismatch " << fmt(ver.max_mismatch)
              << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? 0 : 1;
}

int cmd_dispersion(const LoadedConfig& lc, const fs::path& out_dir) {
    const RunConfig& cfg = lc.config;
    const auto& d = cfg.dispersion;
    const AlphaBeta ab = derive_alpha_beta(cfg.plate, cfg.actuator);

    CsvWriter csv({"k", "omega_fast", "omega_slow", "vp_fast", "vp_slow", "product_residual",
                   "difference_residual"});
    double worst = 0.0;
    for (int i = 0; i < d.samples; ++i) {
        double k;
        if (d.samples == 1) {
            k = d.k_min;
        } else if (d.log_spacing) {
            k = d.k_min * std::pow(d.k_max / d.k_min, double(i) / (d.samples - 1));
        } else {
            k = d.k_min + (d.k_max - d.k_min) * double(i) / (d.samples - 1);
        }
        const DispersionPoint p = dispersion(k, ab.alpha, ab.beta);
        const double k2 = k * k;
        const double uncoupled = k2 * k2 / ab.alpha;
        const double prod_res = std::abs(p.omega_fast * p.omega_slow / uncoupled - 1.0);
        const double diff_target = ab.beta * k2 / ab.alpha;
        const double diff_res =
            diff_target > 0.0
                ? std::abs((p.omega_fast - p.omega_slow) / diff_target - 1.0)
                : std::abs(p.omega_fast - p.omega_slow);
        worst = std::max({worst, prod_res, diff_res});
        csv.row({k, p.omega_fast, p.omega_slow, p.vp_fast, p.vp_slow, prod_res, diff_res});
    }

    fs::create_directories(out_dir);
    write_text(out_dir / "dispersion.csv", csv.os.str());
    write_manifest(out_dir, "dispersion", lc,
                   {{"k_min", d.k_min},
                    {"k_max", d.k_max},
                    {"samples", d.samples},
                    {"spacing", d.log_spacing ? "log" : "linear"}},
                   {"dispersion.csv"});

    const bool ok = worst <= 1e-10;
    std::cout << "dispersion: " << d.samples << " samples, worst identity residual " << fmt(worst)
              << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? 0 : 1;
}

int cmd_modal(const LoadedConfig& lc, const fs::path& out_dir) {
    const RunConfig& cfg = lc.config;
    const auto& mo = cfg.modal;
    const GridSpec grid(cfg.grid_n);
    const DimensionlessGroups groups = derive_circuit_values(
        cfg.plate, cfg.actuator, grid.eps, cfg.R0, cfg.use_actuator_capacitance);

    const Mode mode = make_mode(mo.m, mo.n, mo.discrete_eigenvalue, grid);
    const PEMParams params{groups.alpha, groups.beta, shunt_gamma(groups, mo.R)};
    const ModeInit init{mo.p0, mo.p_dot0, mo.q0, mo.q_dot0};
    const ModeTrajectory traj = mode_evolution(mode, params, init, mo.t_span, mo.samples);

    CsvWriter csv({"t", "p", "p_dot", "q", "q_dot", "mech_energy", "elec_energy", "total_energy"});
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        csv.row({traj.t[i], traj.p[i], traj.p_dot[i], traj.q[i], traj.q_dot[i],
                 traj.mech_energy[i], traj.elec_energy[i], traj.total_energy[i]});
    }

    const double e0 = traj.total_energy.front();
    double drift = 0.0;
    bool monotone = true;
    double min_mech_frac = 1.0, max_elec_frac = 0.0, t_max_elec = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (e0 > 0.0) {
            drift = std::max(drift, std::abs(traj.total_energy[i] - e0) / e0);
            const double frac_m = traj.mech_energy[i] / traj.total_energy[i];
            const double frac_e = traj.elec_energy[i] / traj.total_energy[i];
            min_mech_frac = std::min(min_mech_frac, frac_m);
            if (frac_e > max_elec_frac) {
                max_elec_frac = frac_e;
                t_max_elec = traj.t[i];
            }
        }
        if (i > 0 && traj.total_energy[i] > traj.total_energy[i - 1] + 1e-12 * e0) {
            monotone = false;
        }
    }

    const double omega0 = mode.k2 / std::sqrt(params.alpha);
    const double g = params.beta * mode.k2 / params.alpha;

    json summary;
    summary["mode"] = {{"m", mode.m}, {"n", mode.n}, {"k2", mode.k2}};
    summary["alpha"] = params.alpha;
    summary["beta"] = params.beta;
    summary["gamma"] = params.gamma;
    summary["R"] = mo.R;
    summary["omega0"] = omega0;
    summary["coupling_g"] = g;
    if (g > 0.0) summary["beat_half_period"] = std::numbers::pi / g;
    summary["decay_rate"] = traj.decay_rate;
    summary["min_mech_fraction"] = min_mech_frac;
    summary["max_elec_fraction"] = max_elec_frac;
    summary["t_at_max_elec_fraction"] = t_max_elec;
    summary["energy_drift_rel"] = drift;
    summary["energy_monotone"] = monotone;
    summary["used_expm_fallback"] = traj.used_expm_fallback;

    const bool ok = params.gamma == 0.0 ? drift <= 1e-10 : monotone;
    summary["verification_ok"] = ok;

    fs::create_directories(out_dir);
    write_text(out_dir / "modal.csv", csv.os.str());
    write_text(out_dir / "modal_summary.json", summary.dump(2) + "\n");
    write_manifest(out_dir, "modal", lc,
                   {{"m", mo.m},
                    {"n", mo.n},
                    {"eigenvalue", mo.discrete_eigenvalue ? "discrete" : "continuous"},
                    {"t_span", mo.t_span},
                    {"samples", mo.samples},
                    {"R", mo.R}},
                   {"modal.csv", "modal_summary.json"});

    std::cout << "modal: mode (" << mode.m << "," << mode.n << "), decay rate "
              << fmt(traj.decay_rate) << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? 0 : 1;
}

int cmd_simulate(const LoadedConfig& lc, const fs::path& out_dir) {
    const RunConfig& cfg = lc.config;
    const auto& si = cfg.simulate;
    const GridSpec grid(cfg.grid_n);
    const DimensionlessGroups groups = derive_circuit_values(
        cfg.plate, cfg.actuator, grid.eps, cfg.R0, cfg.use_actuator_capacitance);
    const PEMParams params{groups.alpha, groups.beta, shunt_gamma(groups, si.R)};

    const PemSystem system(grid, cfg.bc, params);

    // initial deformation: one mode shape, purely mechanical, scaled to the
    // requested fraction of the edge length
    const Eigen::VectorXd raw = mode_shape(grid, si.m, si.n);
    PEMState init = PEMState::zero(grid.node_count());
    init.u = si.deflection / raw.cwiseAbs().maxCoeff() * raw;

    const Mode mode = Mode::discrete(si.m, si.n, grid);
    const double omega0 = mode.k2 / std::sqrt(params.alpha);
    const double dt = si.dt > 0.0 ? si.dt : (2.0 * std::numbers::pi / omega0) / 100.0;
    const int steps = std::max(1, static_cast<int>(std::llround(si.t_span / dt)));

    const PemTrajectory traj = system.integrate(init, dt, steps, si.sample_stride);

    const int probe_i = (grid.n + 1) / 2, probe_j = (grid.n + 1) / 2;
    const int probe = grid.index(probe_i, probe_j);
    CsvWriter csv({"t", "mech_energy", "elec_energy", "total_energy", "u_probe", "u_dot_probe",
                   "psi_probe", "psi_dot_probe"});
    for (const auto& s : traj.states) {
        const EnergyBreakdown e = system.energy(s);
        csv.row({s.t, e.mechanical, e.electrical, e.total, s.u[probe], s.u_dot[probe],
                 s.psi[probe], s.psi_dot[probe]});
    }

    const double e0 = traj.step_energies.front().total;
    double drift = 0.0;
    bool monotone = true;
    double peak_psi_dot = 0.0;
    for (std::size_t k = 0; k < traj.step_energies.size(); ++k) {
        drift = std::max(drift, std::abs(traj.step_energies[k].total - e0) / e0);
        if (k > 0 &&
            traj.step_energies[k].total > traj.step_energies[k - 1].total + 1e-12 * e0) {
            monotone = false;
        }
        peak_psi_dot = std::max(peak_psi_dot, traj.step_psi_dot_max[k]);
    }
    const double peak_voltage = groups.v0 * peak_psi_dot;

    json summary;
    summary["mode"] = {{"m", si.m}, {"n", si.n}, {"k2_discrete", mode.k2}};
    summary["alpha"] = params.alpha;
    summary["beta"] = params.beta;
    summary["gamma"] = params.gamma;
    summary["R"] = si.R;
    summary["L"] = groups.L;
    summary["C"] = groups.C;
    summary["v0"] = groups.v0;
    summary["dt"] = dt;
    summary["steps"] = steps;
    summary["omega0_discrete"] = omega0;
    summary["initial_energy"] = e0;
    summary["final_energy"] = traj.step_energies.back().total;
    summary["energy_drift_rel"] = drift;
    summary["energy_monotone"] = monotone;
    summary["peak_psi_dot"] = peak_psi_dot;
    summary["peak_actuator_voltage_V"] = peak_voltage;

    const bool ok = params.gamma == 0.0 ? drift <= 1e-10 : monotone;
    summary["verification_ok"] = ok;

    fs::create_directories(out_dir);
    write_text(out_dir / "trajectory.csv", csv.os.str());
    write_text(out_dir / "simulate_summary.json", summary.dump(2) + "\n");
    write_manifest(out_dir, "simulate", lc,
                   {{"m", si.m},
                    {"n", si.n},
                    {"t_span", si.t_span},
                    {"dt", dt},
                    {"sample_stride", si.sample_stride},
                    {"R", si.R},
                    {"deflection", si.deflection},
                    {"use_actuator_capacitance", cfg.use_actuator_capacitance},
                    {"R0", cfg.R0}},
                   {"trajectory.csv", "simulate_summary.json"});

    std::cout << "simulate: " << steps << " steps, peak actuator voltage " << fmt(peak_voltage)
              << " V" << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? 0 : 1;
}

int cmd_optimize_r(const LoadedConfig& lc, const fs::path& out_dir) {
    const RunConfig& cfg = lc.config;
    const auto& op = cfg.optimize;
    const GridSpec grid(cfg.grid_n);
    const DimensionlessGroups groups = derive_circuit_values(
        cfg.plate, cfg.actuator, grid.eps, cfg.R0, cfg.use_actuator_capacitance);
    const Mode mode = make_mode(op.m, op.n, op.discrete_eigenvalue, grid);

    const ResistanceOptimum opt = optimize_resistance(mode, groups, op.R_min, op.R_max);

    auto abscissa_at = [&](double R) {
        PEMParams p{groups.alpha, groups.beta, derive_gamma(groups, R)};
        return spectral_abscissa(mode_system_matrix(mode, p));
    };
    const double at_half = abscissa_at(0.5 * opt.R_star);
    const double at_double = abscissa_at(2.0 * opt.R_star);
    const bool strictly_better = opt.decay_rate_star < at_half && opt.decay_rate_star < at_double;

    json report;
    report["mode"] = {{"m", mode.m}, {"n", mode.n}, {"k2", mode.k2}};
    report["alpha"] = groups.alpha;
    report["beta"] = groups.beta;
    report["L"] = groups.L;
    report["C"] = groups.C;
    report["R_bounds"] = {op.R_min, op.R_max};
    report["R_star"] = opt.R_star;
    report["gamma_star"] = opt.gamma_star;
    report["decay_rate_star"] = opt.decay_rate_star;
    report["decay_rate_at_half_R"] = at_half;
    report["decay_rate_at_double_R"] = at_double;
    report["interior"] = opt.interior;
    report["strictly_better_than_neighbors"] = strictly_better;
    report["evaluations"] = opt.evaluations;

    const bool ok = opt.interior && strictly_better;
    report["verification_ok"] = ok;

    fs::create_directories(out_dir);
    write_text(out_dir / "optimize_report.json", report.dump(2) + "\n");
    write_manifest(out_dir, "optimize-r", lc,
                   {{"m", op.m},
                    {"n", op.n},
                    {"eigenvalue", op.discrete_eigenvalue ? "discrete" : "continuous"},
                    {"R_min", op.R_min},
                    {"R_max", op.R_max},
                    {"use_actuator_capacitance", cfg.use_actuator_capacitance},
                    {"R0", cfg.R0}},
                   {"optimize_report.json"});

    std::cout << "optimize-r: R_star " << fmt(opt.R_star) << " ohm, decay rate "
              << fmt(opt.decay_rate_star) << (ok ? " (ok)" : " (FAILED)") << "\n";
    return ok ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"lumped electric analog of a thin plate: synthesis, analysis, simulation"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool expand = false;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory")->required();
    };

    CLI::App* synth = app.add_subcommand("synth", "emit the analog netlist and verify it");
    add_common(synth);
    synth->add_flag("--expand-negatives", expand,
                    "realize negative inductors as op-amp sub-circuits");
    CLI::App* disp = app.add_subcommand("dispersion", "sweep the two dispersion branches");
    add_common(disp);
    CLI::App* modal = app.add_subcommand("modal", "closed-form per-mode evolution");
    add_common(modal);
    CLI::App* sim = app.add_subcommand("simulate", "full-grid coupled time integration");
    add_common(sim);
    CLI::App* opt = app.add_subcommand("optimize-r", "search the optimal shunt resistance");
    add_common(opt);

    std::vector<const char*> argv;
    argv.push_back("pem");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const LoadedConfig lc = load_config(config_path);
        for (const auto& w : lc.config.validate()) std::cerr << "warning: " << w << "\n";
        const fs::path out(out_dir);
        if (synth->parsed()) return cmd_synth(lc, out, expand);
        if (disp->parsed()) return cmd_dispersion(lc, out);
        if (modal->parsed()) return cmd_modal(lc, out);
        if (sim->parsed()) return cmd_simulate(lc, out);
        if (opt->parsed()) return cmd_optimize_r(lc, out);
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}

}  // namespace pemsim
