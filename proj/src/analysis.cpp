#include "pemsim/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pemsim {

DispersionPoint dispersion(double k, double alpha, double beta) {
    if (!(k > 0.0)) throw std::invalid_argument("wavenumber k must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");

    const double k2 = k * k;
    const double disc = std::sqrt(beta * beta + 4.0 * alpha);

    DispersionPoint p;
    p.k = k;
    p.omega_fast = k2 * (disc + beta) / (2.0 * alpha);
    p.omega_slow = k2 * (disc - beta) / (2.0 * alpha);
    p.vp_fast = p.omega_fast / k;
    p.vp_slow = p.omega_slow / k;

    const std::complex<double> i_unit(0.0, 1.0);
    if (beta == 0.0) {
        // degenerate branches; ratios taken as the coupled limit
        p.amp_ratio_slow = i_unit;
        p.amp_ratio_fast = -i_unit;
        return p;
    }
    const double k4 = k2 * k2;
    auto ratio = [&](double omega) {
        return i_unit * (beta * k2 * omega) / (k4 - alpha * omega * omega);
    };
    p.amp_ratio_slow = ratio(p.omega_slow);  // -> +i
    p.amp_ratio_fast = ratio(p.omega_fast);  // -> -i
    return p;
}

namespace {

void check_mode_indices(int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("mode indices must be >= 1");
}

}  // namespace

Mode Mode::continuous(int m, int n) {
    check_mode_indices(m, n);
    const double pi = std::numbers::pi;
    return Mode{m, n, (m * pi) * (m * pi) + (n * pi) * (n * pi)};
}

Mode Mode::discrete(int m, int n, const GridSpec& grid) {
    check_mode_indices(m, n);
    if (m > grid.n || n > grid.n) {
        throw std::invalid_argument("mode index exceeds grid resolution");
    }
    return Mode{m, n, laplace_eigenvalue_1d(m, grid) + laplace_eigenvalue_1d(n, grid)};
}

double laplace_eigenvalue_1d(int m, const GridSpec& grid) {
    if (m < 1) throw std::invalid_argument("mode index must be >= 1");
    const double pi = std::numbers::pi;
    return 2.0 * (1.0 - std::cos(m * pi * grid.eps)) / (grid.eps * grid.eps);
}

Eigen::VectorXd mode_shape(const GridSpec& grid, int m, int n) {
    check_mode_indices(m, n);
    if (m > grid.n || n > grid.n) {
        throw std::invalid_argument("mode index exceeds grid resolution");
    }
    const double pi = std::numbers::pi;
    Eigen::VectorXd shape(grid.node_count());
    for (int i = 1; i <= grid.n; ++i) {
        for (int j = 1; j <= grid.n; ++j) {
            shape[grid.index(i, j)] = 2.0 * std::sin(m * pi * grid.x(i)) *
                                      std::sin(n * pi * grid.x(j));
        }
    }
    return shape;
}

std::vector<double> modal_project(const Eigen::VectorXd& field, std::span<const Mode> modes,
                                  const GridSpec& grid) {
    if (field.size() != grid.node_count()) {
        throw std::invalid_argument("field/grid dimension mismatch");
    }
    const double w = grid.eps * grid.eps;
    std::vector<double> coeffs;
    coeffs.reserve(modes.size());
    for (const auto& mode : modes) {
        coeffs.push_back(w * mode_shape(grid, mode.m, mode.n).dot(field));
    }
    return coeffs;
}

Eigen::VectorXd modal_reconstruct(std::span<const double> coeffs, std::span<const Mode> modes,
                                  const GridSpec& grid) {
    if (coeffs.size() != modes.size()) {
        throw std::invalid_argument("coefficient/mode count mismatch");
    }
    Eigen::VectorXd field = Eigen::VectorXd::Zero(grid.node_count());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        field += coeffs[i] * mode_shape(grid, modes[i].m, modes[i].n);
    }
    return field;
}

Eigen::Matrix4d mode_system_matrix(const Mode& mode, const PEMParams& params) {
    params.validate();
    const double w0sq = mode.k2 * mode.k2 / params.alpha;
    const double g = params.beta * mode.k2 / params.alpha;
    const double c = params.gamma / params.alpha;
    Eigen::Matrix4d A;
    A << 0.0, 1.0, 0.0, 0.0,
        -w0sq, 0.0, 0.0, -g,
        0.0, 0.0, 0.0, 1.0,
        0.0, g, -w0sq, -c;
    return A;
}

double spectral_abscissa(const Eigen::Matrix4d& A) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(A, false);
    return es.eigenvalues().real().maxCoeff();
}

ModeTrajectory mode_evolution(const Mode& mode, const PEMParams& params, const ModeInit& init,
                              double t_span, int samples) {
    if (!(t_span > 0.0)) throw std::invalid_argument("t_span must be positive");
    if (samples < 2) throw std::invalid_argument("need at least 2 samples");

    const Eigen::Matrix4d A = mode_system_matrix(mode, params);
    Eigen::EigenSolver<Eigen::Matrix4d> es(A, true);
    const Eigen::Vector4cd lambda = es.eigenvalues();
    const Eigen::Matrix4cd V = es.eigenvectors();

    ModeTrajectory traj;
    traj.decay_rate = lambda.real().maxCoeff();

    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(V);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    const bool defective = !(smin > 0.0) || smax / smin > 1e8;
    traj.used_expm_fallback = defective;

    const Eigen::Vector4d z0(init.p0, init.p_dot0, init.q0, init.q_dot0);
    const double dt = t_span / (samples - 1);
    const double k4 = mode.k2 * mode.k2;

    auto push_sample = [&](double t, const Eigen::Vector4d& z) {
        traj.t.push_back(t);
        traj.p.push_back(z[0]);
        traj.p_dot.push_back(z[1]);
        traj.q.push_back(z[2]);
        traj.q_dot.push_back(z[3]);
        const double mech = 0.5 * (params.alpha * z[1] * z[1] + k4 * z[0] * z[0]);
        const double elec = 0.5 * (params.alpha * z[3] * z[3] + k4 * z[2] * z[2]);
        traj.mech_energy.push_back(mech);
        traj.elec_energy.push_back(elec);
        traj.total_energy.push_back(mech + elec);
    };

    if (!defective) {
        const Eigen::Vector4cd w = V.partialPivLu().solve(z0.cast<std::complex<double>>());
        for (int s = 0; s < samples; ++s) {
            const double t = s * dt;
            Eigen::Vector4cd phase;
            for (int i = 0; i < 4; ++i) phase[i] = std::exp(lambda[i] * t) * w[i];
            push_sample(t, (V * phase).real());
        }
    } else {
        // isolated defective parameter point; step with the dense exponential
        const Eigen::Matrix4d step = (A * dt).exp();
        Eigen::Vector4d z = z0;
        for (int s = 0; s < samples; ++s) {
            push_sample(s * dt, z);
            z = step * z;
        }
    }
    return traj;
}

ResistanceOptimum optimize_resistance(const Mode& mode, const DimensionlessGroups& groups,
                                      double R_min, double R_max) {
    if (!(R_min > 0.0) || !(R_max > R_min)) {
        throw std::invalid_argument("resistance bounds must satisfy 0 < R_min < R_max");
    }
    if (std::log10(R_max / R_min) < 4.0) {
        throw std::invalid_argument("resistance bounds must span at least 4 decades");
    }

    int evals = 0;
    auto abscissa_at = [&](double log_r) {
        ++evals;
        PEMParams params{groups.alpha, groups.beta, derive_gamma(groups, std::exp(log_r))};
        return spectral_abscissa(mode_system_matrix(mode, params));
    };

    // coarse log-grid scan to bracket the minimum before the line search;
    // the abscissa can have kinks where pole pairs coalesce
    const double lo = std::log(R_min), hi = std::log(R_max);
    constexpr int kScan = 33;
    int best = 0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScan; ++i) {
        const double f = abscissa_at(lo + (hi - lo) * i / (kScan - 1));
        if (f < best_f) {
            best_f = f;
            best = i;
        }
    }

    ResistanceOptimum opt;
    if (best == 0 || best == kScan - 1) {
        // no interior bracket; report the boundary solution
        opt.R_star = best == 0 ? R_min : R_max;
        opt.gamma_star = derive_gamma(groups, opt.R_star);
        opt.decay_rate_star = best_f;
        opt.evaluations = evals;
        opt.interior = false;
        return opt;
    }

    // golden-section minimization inside the bracketing cells
    const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
    double a = lo + (hi - lo) * (best - 1) / (kScan - 1);
    double b = lo + (hi - lo) * (best + 1) / (kScan - 1);
    double x1 = b - (b - a) / gr;
    double x2 = a + (b - a) / gr;
    double f1 = abscissa_at(x1);
    double f2 = abscissa_at(x2);
    while (b - a > 1e-10 * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) / gr;
            f1 = abscissa_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) / gr;
            f2 = abscissa_at(x2);
        }
    }
    const double log_star = (a + b) / 2.0;

    opt.R_star = std::exp(log_star);
    opt.gamma_star = derive_gamma(groups, opt.R_star);
    opt.decay_rate_star = abscissa_at(log_star);
    opt.evaluations = evals;
    const double margin = 1e-6 * (hi - lo);
    opt.interior = log_star - lo > margin && hi - log_star > margin;
    return opt;
}

}  // namespace pemsim
