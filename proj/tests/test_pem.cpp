#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pemsim/analysis.hpp"
#include "pemsim/pem.hpp"

using namespace pemsim;

namespace {

constexpr double kPi = std::numbers::pi;

ActuatorParams reference_actuator() { return ActuatorParams{0.1, 0.05, 1e-3, 1e-5, 0.1}; }

PEMState random_state(const GridSpec& g, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    PEMState s = PEMState::zero(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) {
        s.u[i] = gauss(rng);
        s.u_dot[i] = gauss(rng);
        s.psi[i] = gauss(rng);
        s.psi_dot[i] = gauss(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("actuator constitutive law") {
    const ActuatorParams act = reference_actuator();

    const ActuatorMoments zero = actuator_constitutive(0.0, 0.0, 0.0, act);
    CHECK(zero.M_xx == 0.0);
    CHECK(zero.M_yy == 0.0);
    CHECK(zero.Q == 0.0);

    // unit voltage, flat plate
    const ActuatorMoments v1 = actuator_constitutive(0.0, 0.0, 1.0, act);
    CHECK(v1.M_xx == doctest::Approx(-act.g_em / act.b).epsilon(1e-14));
    CHECK(v1.M_yy == doctest::Approx(-act.g_em / act.b).epsilon(1e-14));
    CHECK(v1.Q == doctest::Approx(act.g_ee).epsilon(1e-14));

    // equal curvatures, shorted terminals
    const double c = 0.37;
    const ActuatorMoments bend = actuator_constitutive(c, c, 0.0, act);
    CHECK(bend.Q == doctest::Approx(2.0 * act.b * act.g_em * c).epsilon(1e-14));
    CHECK(bend.M_xx == doctest::Approx((act.g_mm + act.g_12) * c).epsilon(1e-14));
    CHECK(bend.M_xx == bend.M_yy);
}

TEST_CASE("actuator current") {
    const ActuatorParams act = reference_actuator();
    CHECK(actuator_current(0.0, 0.0, act) == 0.0);
    CHECK(actuator_current(1.0, 0.0, act) == doctest::Approx(act.g_ee).epsilon(1e-14));
    CHECK(actuator_current(0.0, 1.0, act) == doctest::Approx(act.b * act.g_em).epsilon(1e-14));
}

TEST_CASE("uncoupled limit splits into two plate equations") {
    GridSpec g(6);
    PemSystem sys(g, BoundaryCondition::SimplySupported, PEMParams{1.0, 0.0, 0.0});
    const int N = g.node_count();
    const Eigen::SparseMatrix<double> A = sys.system_matrix();
    // no entries may connect the (u, u') block with the (psi, psi') block
    for (int k = 0; k < A.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            const bool row_mech = it.row() < 2 * N;
            const bool col_mech = it.col() < 2 * N;
            CHECK(row_mech == col_mech);
        }
    }
}

TEST_CASE("coupling blocks are exact negative transposes") {
    GridSpec g(6);
    PemSystem sys(g, BoundaryCondition::Clamped, PEMParams{0.7, 0.23, 0.0});
    const int N = g.node_count();
    const Eigen::SparseMatrix<double> A = sys.system_matrix();
    const Eigen::MatrixXd dense(A);
    const Eigen::MatrixXd c_up = dense.block(N, 3 * N, N, N);    // u' row, psi' column
    const Eigen::MatrixXd c_down = dense.block(3 * N, N, N, N);  // psi' row, u' column
    CHECK((c_up + c_down.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c_up.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("energy of the zero state vanishes") {
    GridSpec g(5);
    PemSystem sys(g, BoundaryCondition::Clamped, PEMParams{1.0, 0.1, 0.0});
    const EnergyBreakdown e = sys.energy(PEMState::zero(g.node_count()));
    CHECK(e.mechanical == 0.0);
    CHECK(e.electrical == 0.0);
    CHECK(e.total == 0.0);
}

TEST_CASE("conservative runs hold total energy to 1e-10") {
    GridSpec g(6);
    std::mt19937 rng(4711);
    for (auto bc : {BoundaryCondition::Clamped, BoundaryCondition::SimplySupported}) {
        PemSystem sys(g, bc, PEMParams{0.9, 0.05, 0.0});
        const PEMState init = random_state(g, rng);
        const auto traj = sys.integrate(init, 0.002, 2000, 100);
        const double e0 = traj.step_energies.front().total;
        for (const auto& e : traj.step_energies) {
            CHECK(std::abs(e.total - e0) <= 1e-10 * e0);
            CHECK(e.mechanical >= 0.0);
            CHECK(e.electrical >= 0.0);
            CHECK(e.total == e.mechanical + e.electrical);
        }
    }
}

TEST_CASE("dissipative runs are monotone and follow the energy balance") {
    GridSpec g(6);
    std::mt19937 rng(271828);
    PEMParams params{0.9, 0.05, 0.4};
    PemSystem sys(g, BoundaryCondition::SimplySupported, params);
    const PEMState init = random_state(g, rng);
    const double dt = 0.001;
    const auto traj = sys.integrate(init, dt, 3000, 1);
    const double e0 = traj.step_energies.front().total;
    const double w = g.eps * g.eps;
    for (std::size_t k = 1; k < traj.step_energies.size(); ++k) {
        const double before = traj.step_energies[k - 1].total;
        const double after = traj.step_energies[k].total;
        CHECK(after <= before + 1e-12 * e0);
        // midpoint energy balance: dE = -gamma eps^2 |psi'_mid|^2 dt
        const Eigen::VectorXd psi_dot_mid =
            0.5 * (traj.states[k].psi_dot + traj.states[k - 1].psi_dot);
        const double expected = -params.gamma * w * psi_dot_mid.squaredNorm() * dt;
        CHECK(after - before == doctest::Approx(expected).epsilon(1e-6).scale(e0));
    }
}

TEST_CASE("single-mode runs track the analytic cosine") {
    GridSpec g(8);
    PEMParams params{1.0, 0.0, 0.0};
    PemSystem sys(g, BoundaryCondition::SimplySupported, params);
    const Mode mode = Mode::discrete(1, 1, g);
    const double w0 = mode.k2 / std::sqrt(params.alpha);
    const double T = 2.0 * kPi / w0;

    PEMState init = PEMState::zero(g.node_count());
    init.u = mode_shape(g, 1, 1);

    auto max_error = [&](int divisions) {
        const auto traj = sys.integrate(init, T / divisions, divisions, 1);
        double err = 0.0;
        for (const auto& s : traj.states) {
            err = std::max(err, (s.u - std::cos(w0 * s.t) * init.u).cwiseAbs().maxCoeff());
        }
        return err;
    };

    // second-order phase error; values frozen from the analytic solution
    const double e200 = max_error(200);
    const double e400 = max_error(400);
    CHECK(e200 <= 1e-3);
    CHECK(e400 == doctest::Approx(e200 / 4.0).epsilon(0.05));
    CHECK(max_error(5000) <= 2e-6);
}

TEST_CASE("reciprocity: swapping fields and negating beta maps solutions to solutions") {
    GridSpec g(5);
    std::mt19937 rng(13);
    const PEMState init = random_state(g, rng);
    PEMState swapped = init;
    std::swap(swapped.u, swapped.psi);
    std::swap(swapped.u_dot, swapped.psi_dot);

    PemSystem forward(g, BoundaryCondition::SimplySupported, PEMParams{1.2, 0.3, 0.0});
    PemSystem mirrored(g, BoundaryCondition::SimplySupported, PEMParams{1.2, -0.3, 0.0});
    const auto t1 = forward.integrate(init, 0.003, 500, 50);
    const auto t2 = mirrored.integrate(swapped, 0.003, 500, 50);
    REQUIRE(t1.states.size() == t2.states.size());
    for (std::size_t k = 0; k < t1.states.size(); ++k) {
        auto close = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
            return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
        };
        CHECK(close(t1.states[k].u, t2.states[k].psi));
        CHECK(close(t1.states[k].psi, t2.states[k].u));
        CHECK(close(t1.states[k].u_dot, t2.states[k].psi_dot));
    }
}

TEST_CASE("mode vectors block-reduce the full system to the 4x4 form") {
    GridSpec g(7);
    const PEMParams params{0.8, 0.12, 0.25};
    PemSystem sys(g, BoundaryCondition::SimplySupported, params);
    const Eigen::SparseMatrix<double> A = sys.system_matrix();
    const int N = g.node_count();

    for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 3}}) {
        const Mode mode = Mode::discrete(m, n, g);
        Eigen::VectorXd phi = mode_shape(g, m, n);
        phi.normalize();
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(4 * N, 4);
        V.block(0, 0, N, 1) = phi;          // p
        V.block(N, 1, N, 1) = phi;          // p'
        V.block(2 * N, 2, N, 1) = phi;      // q
        V.block(3 * N, 3, N, 1) = phi;      // q'
        const Eigen::Matrix4d reduced = V.transpose() * A * V;
        const Eigen::Matrix4d expected = mode_system_matrix(mode, params);
        CHECK((reduced - expected).cwiseAbs().maxCoeff() <=
              1e-12 * expected.cwiseAbs().maxCoeff());
        // the subspace is invariant: A V stays inside span(V)
        const Eigen::MatrixXd residual = A * V - V * reduced;
        CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9 * expected.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("integration input validation") {
    GridSpec g(5);
    PemSystem sys(g, BoundaryCondition::Clamped, PEMParams{1.0, 0.0, 0.0});
    const PEMState init = PEMState::zero(g.node_count());
    CHECK_THROWS_AS(sys.integrate(init, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(sys.integrate(init, 0.1, 0), std::invalid_argument);
    PEMState bad = PEMState::zero(g.node_count() + 1);
    CHECK_THROWS_AS(sys.integrate(bad, 0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(PemSystem(g, BoundaryCondition::Clamped, PEMParams{-1.0, 0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PemSystem(g, BoundaryCondition::Clamped, PEMParams{1.0, 0.0, -0.5}),
                    std::invalid_argument);
}
