// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Exit status is nonzero if any criterion fails.

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "pemsim/analysis.hpp"
#include "pemsim/commands.hpp"
#include "pemsim/netlist.hpp"
#include "pemsim/operators.hpp"
#include "pemsim/pem.hpp"
#include "pemsim/plate.hpp"
#include "pemsim/version.hpp"

using namespace pemsim;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int g_failures = 0;

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;

    template <typename Fn>
    void run(Fn&& body) const {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (limit_seconds > 0.0 && secs > limit_seconds) {
            ok = false;
            detail += " [over time budget]";
        }
        std::printf("criterion %d %s  %-34s (%.2fs)  %s\n", id, ok ? "PASS" : "FAIL", title, secs,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

PlateParams aluminum() { return PlateParams{2700.0, 69e9, 1e-3, 1.0, 1.0, 1.0}; }

ActuatorParams section4_actuator(double g_ee) { return ActuatorParams{0.0, 0.0, 1e-3, g_ee, 0.1}; }

std::string fmtd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------

bool analog_equivalence(std::string& detail) {
    std::mt19937 rng(20240229);
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 5; n <= 10; ++n) {
        GridSpec grid(n);
        for (auto bc : {BoundaryCondition::Clamped, BoundaryCondition::SimplySupported}) {
            const SparseOperator bih = assemble_biharmonic(grid, bc);
            for (int trial = 0; trial < 10; ++trial) {  // 20 parameter sets per grid
                const double alpha = std::pow(10.0, logu(rng));
                const double R0 = 1000.0 * std::pow(10.0, 2.0 * logu(rng));
                const double t0 = std::pow(10.0, logu(rng));
                const AnalogElementValues v =
                    identify_edge_admittances(grid.eps, alpha, R0, t0);
                const Netlist nl = build_netlist(v, grid, bc, false);
                worst = std::max(worst, verify_analog(nl, bih, alpha).max_mismatch);
            }
        }
    }
    detail = "max mismatch " + fmtd(worst);
    return worst <= 1e-12;
}

bool stencil_correctness(std::string& detail) {
    // fourth difference of x^4 is exact
    GridSpec g(11);
    double worst24 = 0.0;
    for (auto bc : {BoundaryCondition::Clamped, BoundaryCondition::SimplySupported}) {
        const SparseOperator bih = assemble_biharmonic(g, bc);
        Eigen::VectorXd u(g.node_count());
        for (int i = 1; i <= g.n; ++i) {
            for (int j = 1; j <= g.n; ++j) u[g.index(i, j)] = std::pow(g.x(i), 4);
        }
        const Eigen::VectorXd bu = bih.apply(u);
        for (int i = 3; i <= g.n - 2; ++i) {
            for (int j = 3; j <= g.n - 2; ++j) {
                worst24 = std::max(worst24, std::abs(bu[g.index(i, j)] - 24.0));
            }
        }
    }
    if (worst24 > 1e-8) {
        detail = "biharmonic(x^4) off by " + fmtd(worst24);
        return false;
    }

    // sine-mode residual order over eps = 1/8 .. 1/64
    auto u = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    auto exact = [&](double x, double y) { return 4.0 * std::pow(kPi, 4) * u(x, y); };
    const int sizes[] = {7, 15, 31, 63};
    const ConvergenceStudy study =
        estimate_convergence_order(u, exact, BoundaryCondition::SimplySupported, sizes);
    detail = "residual(x^4-24) " + fmtd(worst24) + ", sine order " + fmtd(study.order);
    return !study.exact && study.order >= 1.9 && study.order <= 2.1;
}

bool dispersion_identities(std::string& detail) {
    double worst = 0.0;
    bool bracketed = true;
    for (int ia = 0; ia < 10; ++ia) {
        for (int ib = 0; ib < 10; ++ib) {
            for (int ik = 0; ik < 10; ++ik) {
                const double alpha = 0.1 * std::pow(100.0, ia / 9.0);
                const double beta = 0.01 * std::pow(100.0, ib / 9.0);
                const double k = 0.3 * std::pow(10.0, ik / 9.0);
                const DispersionPoint p = dispersion(k, alpha, beta);
                const double k4 = std::pow(k, 4);
                const double prod = std::abs(p.omega_fast * p.omega_slow - k4 / alpha) /
                                    (k4 / alpha);
                const double want_diff = beta * k * k / alpha;
                const double diff =
                    std::abs(p.omega_fast - p.omega_slow - want_diff) / want_diff;
                worst = std::max({worst, prod, diff});
                const double uncoupled = k * k / std::sqrt(alpha);
                bracketed = bracketed && p.omega_slow <= uncoupled && uncoupled <= p.omega_fast;
            }
        }
    }
    detail = "worst relative residual " + fmtd(worst);
    return worst <= 1e-10 && bracketed;
}

bool amplitude_relation(std::string& detail) {
    double worst_mod = 0.0, worst_phase = 0.0;
    for (int ia = 0; ia < 10; ++ia) {
        for (int ib = 0; ib < 10; ++ib) {
            for (int ik = 0; ik < 10; ++ik) {
                const double alpha = 0.1 * std::pow(100.0, ia / 9.0);
                const double beta = 0.01 * std::pow(100.0, ib / 9.0);
                const double k = 0.3 * std::pow(10.0, ik / 9.0);
                const DispersionPoint p = dispersion(k, alpha, beta);
                worst_mod = std::max({worst_mod, std::abs(std::abs(p.amp_ratio_slow) - 1.0),
                                      std::abs(std::abs(p.amp_ratio_fast) - 1.0)});
                worst_phase =
                    std::max({worst_phase, std::abs(std::arg(p.amp_ratio_slow) - kPi / 2.0),
                              std::abs(std::arg(p.amp_ratio_fast) + kPi / 2.0)});
            }
        }
    }
    detail = "modulus err " + fmtd(worst_mod) + ", phase err " + fmtd(worst_phase);
    return worst_mod <= 1e-10 && worst_phase <= 1e-10;
}

bool energy_exchange(std::string& detail) {
    // closed form, g/omega0 = 0.01
    const Mode mode = Mode::continuous(1, 1);
    const PEMParams params{1.0, 0.01, 0.0};
    const double g = params.beta * mode.k2 / params.alpha;
    const ModeTrajectory traj =
        mode_evolution(mode, params, ModeInit{1.0, 0.0, 0.0, 0.0}, kPi / g, 20001);
    double max_elec = 0.0, drift_cf = 0.0;
    const double e0 = traj.total_energy.front();
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        max_elec = std::max(max_elec, traj.elec_energy[s] / traj.total_energy[s]);
        drift_cf = std::max(drift_cf, std::abs(traj.total_energy[s] - e0) / e0);
    }
    if (max_elec < 0.99 || drift_cf > 1e-12) {
        detail = "closed form: elec fraction " + fmtd(max_elec) + ", drift " + fmtd(drift_cf);
        return false;
    }

    // full grid, implicit midpoint, n = 8, 1e4 steps
    GridSpec grid(8);
    const Mode dmode = Mode::discrete(1, 1, grid);
    PemSystem sys(grid, BoundaryCondition::SimplySupported, params);
    PEMState init = PEMState::zero(grid.node_count());
    init.u = mode_shape(grid, 1, 1);
    const double omega0 = dmode.k2 / std::sqrt(params.alpha);
    const double dt = (2.0 * kPi / omega0) / 50.0;
    const PemTrajectory full = sys.integrate(init, dt, 10000, 1000);
    const double f0 = full.step_energies.front().total;
    double drift_grid = 0.0;
    for (const auto& e : full.step_energies) {
        drift_grid = std::max(drift_grid, std::abs(e.total - f0) / f0);
    }
    detail = "elec fraction " + fmtd(max_elec) + ", drift closed " + fmtd(drift_cf) +
             ", grid " + fmtd(drift_grid);
    return drift_grid <= 1e-10;
}

bool damped_optimum(std::string& detail) {
    const DimensionlessGroups groups =
        derive_circuit_values(aluminum(), section4_actuator(1e-5), 0.1, 1000.0, true);
    const Mode mode = Mode::continuous(1, 1);
    const ResistanceOptimum opt = optimize_resistance(mode, groups, 1e2, 1e9);

    auto abscissa_at = [&](double R) {
        PEMParams p{groups.alpha, groups.beta, derive_gamma(groups, R)};
        return spectral_abscissa(mode_system_matrix(mode, p));
    };
    const bool strictly_better = opt.decay_rate_star < abscissa_at(0.5 * opt.R_star) &&
                                 opt.decay_rate_star < abscissa_at(2.0 * opt.R_star);

    // full-grid dissipation at the optimal shunt is monotone step by step
    GridSpec grid(9);
    const PEMParams params{groups.alpha, groups.beta, opt.gamma_star};
    PemSystem sys(grid, BoundaryCondition::SimplySupported, params);
    PEMState init = PEMState::zero(grid.node_count());
    const Eigen::VectorXd raw = mode_shape(grid, 1, 1);
    init.u = 0.01 / raw.cwiseAbs().maxCoeff() * raw;
    const Mode dmode = Mode::discrete(1, 1, grid);
    const double dt = (2.0 * kPi / (dmode.k2 / std::sqrt(params.alpha))) / 100.0;
    const PemTrajectory traj = sys.integrate(init, dt, 4000, 500);
    bool monotone = true;
    const double e0 = traj.step_energies.front().total;
    for (std::size_t k = 1; k < traj.step_energies.size(); ++k) {
        if (traj.step_energies[k].total > traj.step_energies[k - 1].total + 1e-12 * e0) {
            monotone = false;
        }
    }
    detail = "R* " + fmtd(opt.R_star) + " ohm, rate " + fmtd(opt.decay_rate_star) +
             (monotone ? ", energy monotone" : ", energy NOT monotone");
    return opt.interior && strictly_better && monotone;
}

bool feasibility_band(std::string& detail) {
    // inductance band over the documented g_ee range
    bool in_band = true;
    bool few_henry = false;
    for (double g_ee : {1e-7, 3e-7, 1e-6, 3e-6, 1e-5}) {
        const DimensionlessGroups g =
            derive_circuit_values(aluminum(), section4_actuator(g_ee), 0.1, 1000.0, true);
        in_band = in_band && g.L >= 0.1 && g.L <= 1000.0;
        few_henry = few_henry || (g.L >= 1.0 && g.L <= 10.0);
    }
    if (!in_band || !few_henry) {
        detail = "inductance band violated";
        return false;
    }

    // documented 10 uF set: run the CLI end to end and read the reports back
    const fs::path dir = fs::temp_directory_path() / "pemsim_acceptance_c7";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.conf");
        cfg << "[plate]\nrho = 2700.0\nE = 69e9\nh = 1e-3\na = 1.0\nl0 = 1.0\nt0 = 1.0\n"
            << "[actuator]\ng_em = 1e-3\ng_ee = 1e-5\nb = 0.1\n"
            << "[grid]\nn = 9\nbc = simply_supported\n"
            << "[circuit]\nR0 = 1000.0\nuse_actuator_capacitance = true\n"
            << "[simulate]\nt_span = 44.0\ndt = 1.8e-3\nsample_stride = 100\n";
    }
    const int rc = run_cli({"simulate", "--config", (dir / "run.conf").string(), "--out",
                            (dir / "out").string()});
    if (rc != 0) {
        detail = "simulate run failed";
        return false;
    }
    std::ifstream sj(dir / "out" / "simulate_summary.json");
    std::ifstream mj(dir / "out" / "manifest.json");
    const nlohmann::json summary = nlohmann::json::parse(sj);
    const nlohmann::json manifest = nlohmann::json::parse(mj);
    const double peak = summary["peak_actuator_voltage_V"].get<double>();
    const bool marked = manifest.contains("actuator") &&
                        manifest["actuator"]["g_ee"].get<double>() == 1e-5;
    detail = "L band ok, peak voltage " + fmtd(peak) + " V";
    return peak > 0.0 && peak < 50.0 && marked;
}

bool cross_module_consistency(std::string& detail) {
    GridSpec grid(8);
    const PEMParams params{1.0, 0.05, 0.3};
    PemSystem sys(grid, BoundaryCondition::SimplySupported, params);
    const Eigen::SparseMatrix<double> A = sys.system_matrix();
    const int N = grid.node_count();

    double worst = 0.0;
    for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}}) {
        const Mode mode = Mode::discrete(m, n, grid);
        Eigen::VectorXd phi = mode_shape(grid, m, n);
        phi.normalize();
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(4 * N, 4);
        V.block(0, 0, N, 1) = phi;
        V.block(N, 1, N, 1) = phi;
        V.block(2 * N, 2, N, 1) = phi;
        V.block(3 * N, 3, N, 1) = phi;
        const Eigen::Matrix4d reduced = V.transpose() * A * V;

        Eigen::EigenSolver<Eigen::Matrix4d> es_full(reduced, false);
        Eigen::EigenSolver<Eigen::Matrix4d> es_mode(mode_system_matrix(mode, params), false);
        std::vector<std::complex<double>> a(4), b(4);
        for (int i = 0; i < 4; ++i) {
            a[static_cast<std::size_t>(i)] = es_full.eigenvalues()[i];
            b[static_cast<std::size_t>(i)] = es_mode.eigenvalues()[i];
        }
        auto lex = [](const std::complex<double>& x, const std::complex<double>& y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        };
        std::sort(a.begin(), a.end(), lex);
        std::sort(b.begin(), b.end(), lex);
        double scale = 1.0;
        for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(b[static_cast<std::size_t>(i)]));
        for (int i = 0; i < 4; ++i) {
            worst = std::max(worst,
                             std::abs(a[static_cast<std::size_t>(i)] -
                                      b[static_cast<std::size_t>(i)]) / scale);
        }
    }
    detail = "worst eigenvalue gap " + fmtd(worst) + " (relative)";
    return worst <= 1e-12;
}

}  // namespace

int main() {
    std::printf("acceptance suite, %s\n", kToolVersion);
    Criterion{1, "analog equivalence oracle", 5.0}.run(analog_equivalence);
    Criterion{2, "stencil correctness", 5.0}.run(stencil_correctness);
    Criterion{3, "dispersion identities", 1.0}.run(dispersion_identities);
    Criterion{4, "amplitude relation", 1.0}.run(amplitude_relation);
    Criterion{5, "energy exchange", 30.0}.run(energy_exchange);
    Criterion{6, "damped optimum", 30.0}.run(damped_optimum);
    Criterion{7, "feasibility band", 0.0}.run(feasibility_band);
    Criterion{8, "cross-module consistency", 0.0}.run(cross_module_consistency);

    if (g_failures == 0) {
        std::printf("acceptance: all 8 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
