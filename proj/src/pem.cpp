#include "pemsim/pem.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace pemsim {

void PEMParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("alpha must be positive");
    }
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be non-negative");
    }
}

PEMState PEMState::zero(int node_count) {
    PEMState s;
    s.u = Eigen::VectorXd::Zero(node_count);
    s.u_dot = Eigen::VectorXd::Zero(node_count);
    s.psi = Eigen::VectorXd::Zero(node_count);
    s.psi_dot = Eigen::VectorXd::Zero(node_count);
    return s;
}

ActuatorMoments actuator_constitutive(double u_xx, double u_yy, double v,
                                      const ActuatorParams& act) {
    if (!std::isfinite(u_xx) || !std::isfinite(u_yy) || !std::isfinite(v)) {
        throw std::invalid_argument("actuator_constitutive needs finite inputs");
    }
    ActuatorMoments m;
    m.M_xx = act.g_mm * u_xx + act.g_12 * u_yy - (act.g_em / act.b) * v;
    m.M_yy = act.g_12 * u_xx + act.g_mm * u_yy - (act.g_em / act.b) * v;
    m.Q = act.b * act.g_em * (u_xx + u_yy) + act.g_ee * v;
    return m;
}

double actuator_current(double v_dot, double lap_u_dot, const ActuatorParams& act) {
    if (!std::isfinite(v_dot) || !std::isfinite(lap_u_dot)) {
        throw std::invalid_argument("actuator_current needs finite inputs");
    }
    return act.g_ee * v_dot + act.b * act.g_em * lap_u_dot;
}

PemSystem::PemSystem(const GridSpec& grid, BoundaryCondition bc, const PEMParams& params)
    : grid_(grid),
      bc_(bc),
      params_(params),
      biharmonic_(assemble_biharmonic(grid, bc)),
      laplacian_(assemble_laplacian(grid, bc)) {
    params_.validate();
}

Eigen::SparseMatrix<double> PemSystem::system_matrix() const {
    const int N = grid_.node_count();
    const double ia = 1.0 / params_.alpha;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(
        2 * N + 2 * biharmonic_.matrix().nonZeros() + 2 * laplacian_.matrix().nonZeros() + N));

    // blocks: rows/cols ordered (u, u', psi, psi')
    for (int i = 0; i < N; ++i) trips.emplace_back(i, N + i, 1.0);          // u' feed
    for (int i = 0; i < N; ++i) trips.emplace_back(2 * N + i, 3 * N + i, 1.0);  // psi' feed

    const auto& B = biharmonic_.matrix();
    for (int k = 0; k < B.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, k); it; ++it) {
            const double v = -ia * it.value();
            trips.emplace_back(N + static_cast<int>(it.row()), static_cast<int>(it.col()), v);
            trips.emplace_back(3 * N + static_cast<int>(it.row()),
                               2 * N + static_cast<int>(it.col()), v);
        }
    }
    if (params_.beta != 0.0) {
        const auto& Lap = laplacian_.matrix();
        for (int k = 0; k < Lap.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(Lap, k); it; ++it) {
                const double v = ia * params_.beta * it.value();
                // skew pair: +beta Lap psi' in the u equation, -beta Lap u' in the psi one
                trips.emplace_back(N + static_cast<int>(it.row()),
                                   3 * N + static_cast<int>(it.col()), v);
                trips.emplace_back(3 * N + static_cast<int>(it.row()),
                                   N + static_cast<int>(it.col()), -v);
            }
        }
    }
    if (params_.gamma != 0.0) {
        for (int i = 0; i < N; ++i) {
            trips.emplace_back(3 * N + i, 3 * N + i, -ia * params_.gamma);
        }
    }

    Eigen::SparseMatrix<double> A(4 * N, 4 * N);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

Eigen::VectorXd PemSystem::pack(const PEMState& s) const {
    const int N = grid_.node_count();
    if (s.size() != N) throw std::invalid_argument("state/grid dimension mismatch");
    Eigen::VectorXd z(4 * N);
    z.segment(0, N) = s.u;
    z.segment(N, N) = s.u_dot;
    z.segment(2 * N, N) = s.psi;
    z.segment(3 * N, N) = s.psi_dot;
    return z;
}

PEMState PemSystem::unpack(const Eigen::VectorXd& z, double t) const {
    const int N = grid_.node_count();
    if (z.size() != 4 * N) throw std::invalid_argument("state vector size mismatch");
    PEMState s;
    s.u = z.segment(0, N);
    s.u_dot = z.segment(N, N);
    s.psi = z.segment(2 * N, N);
    s.psi_dot = z.segment(3 * N, N);
    s.t = t;
    return s;
}

EnergyBreakdown PemSystem::energy(const PEMState& s) const {
    const int N = grid_.node_count();
    if (s.size() != N) throw std::invalid_argument("state/grid dimension mismatch");
    const double w = 0.5 * grid_.eps * grid_.eps;
    const double a = params_.alpha;
    EnergyBreakdown e;
    e.mechanical = w * (a * s.u_dot.squaredNorm() + s.u.dot(biharmonic_.apply(s.u)));
    e.electrical = w * (a * s.psi_dot.squaredNorm() + s.psi.dot(biharmonic_.apply(s.psi)));
    e.total = e.mechanical + e.electrical;
    return e;
}

PemTrajectory PemSystem::integrate(const PEMState& initial, double dt, int steps,
                                   int sample_stride) const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");

    const int N = grid_.node_count();
    const Eigen::SparseMatrix<double> A = system_matrix();
    Eigen::SparseMatrix<double> I(4 * N, 4 * N);
    I.setIdentity();
    const Eigen::SparseMatrix<double> lhs = I - (dt / 2.0) * A;
    const Eigen::SparseMatrix<double> rhs = I + (dt / 2.0) * A;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success) {
        // cannot happen for dt > 0 with this system; report rather than guess
        throw std::runtime_error("implicit-midpoint step matrix is singular");
    }

    PemTrajectory traj;
    traj.states.reserve(static_cast<std::size_t>(steps / sample_stride) + 2);
    traj.step_times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.step_energies.reserve(static_cast<std::size_t>(steps) + 1);

    Eigen::VectorXd z = pack(initial);
    const double t0 = initial.t;
    traj.states.push_back(initial);
    traj.states.back().t = t0;
    traj.step_times.push_back(t0);
    traj.step_energies.push_back(energy(initial));
    traj.step_psi_dot_max.push_back(initial.psi_dot.cwiseAbs().maxCoeff());

    for (int k = 1; k <= steps; ++k) {
        z = lu.solve(rhs * z);
        const double t = t0 + k * dt;
        PEMState s = unpack(z, t);
        traj.step_times.push_back(t);
        traj.step_energies.push_back(energy(s));
        traj.step_psi_dot_max.push_back(s.psi_dot.cwiseAbs().maxCoeff());
        if (k % sample_stride == 0 || k == steps) traj.states.push_back(std::move(s));
    }
    return traj;
}

}  // namespace pemsim
