#pragma once

#include <Eigen/Sparse>

#include <vector>

#include "pemsim/grid.hpp"
#include "pemsim/operators.hpp"
#include "pemsim/plate.hpp"

namespace pemsim {

/// Dimensionless parameters of the coupled plate/circuit field equations.
struct PEMParams {
    double alpha;
    double beta;
    double gamma = 0.0;

    void validate() const;
};

/// Full-grid state: deflection, voltage-integral field and their rates.
struct PEMState {
    Eigen::VectorXd u;        ///< deflection
    Eigen::VectorXd u_dot;    ///< deflection velocity
    Eigen::VectorXd psi;      ///< time integral of the electric potential
    Eigen::VectorXd psi_dot;  ///< voltage
    double t = 0.0;

    static PEMState zero(int node_count);
    int size() const { return static_cast<int>(u.size()); }
};

struct EnergyBreakdown {
    double mechanical = 0.0;
    double electrical = 0.0;
    double total = 0.0;
};

struct ActuatorMoments {
    double M_xx;
    double M_yy;
    double Q;
};

/// Actuator constitutive law: bending moments and stored charge from the
/// local curvatures and the terminal voltage.
ActuatorMoments actuator_constitutive(double u_xx, double u_yy, double v,
                                      const ActuatorParams& act);

/// Current drawn by one actuator: a capacitive term plus the impressed
/// term driven by the curvature rate, i = g_ee vdot + b g_em lap(udot).
double actuator_current(double v_dot, double lap_u_dot, const ActuatorParams& act);

struct PemTrajectory {
    std::vector<PEMState> states;               ///< sampled, includes the initial state
    std::vector<double> step_times;             ///< every step, includes t = 0
    std::vector<EnergyBreakdown> step_energies; ///< every step, includes t = 0
    std::vector<double> step_psi_dot_max;       ///< max |psi'| per step (peak voltage probe)
};

/// Semi-discrete coupled system on one grid,
///   alpha u''   = -B u   + beta Lap psi'
///   alpha psi'' = -B psi - beta Lap u' - gamma psi'
/// with B the discrete biharmonic and Lap the discrete Laplacian. The
/// first-order state is z = (u, u', psi, psi').
class PemSystem {
public:
    PemSystem(const GridSpec& grid, BoundaryCondition bc, const PEMParams& params);

    const GridSpec& grid() const { return grid_; }
    BoundaryCondition bc() const { return bc_; }
    const PEMParams& params() const { return params_; }
    const SparseOperator& biharmonic() const { return biharmonic_; }
    const SparseOperator& laplacian() const { return laplacian_; }
    int state_size() const { return 4 * grid_.node_count(); }

    /// The 4N x 4N first-order system matrix A with z' = A z.
    Eigen::SparseMatrix<double> system_matrix() const;

    Eigen::VectorXd pack(const PEMState& s) const;
    PEMState unpack(const Eigen::VectorXd& z, double t) const;

    /// Quadratic energy of a state. The eps^2 weight makes the sums grid
    /// quadrature approximations of the continuous energy integrals.
    EnergyBreakdown energy(const PEMState& s) const;

    /// Implicit-midpoint integration: one sparse factorization up front,
    /// one solve per step. Full states are kept every sample_stride steps,
    /// energies every step.
    PemTrajectory integrate(const PEMState& initial, double dt, int steps,
                            int sample_stride = 1) const;

private:
    GridSpec grid_;
    BoundaryCondition bc_;
    PEMParams params_;
    SparseOperator biharmonic_;
    SparseOperator laplacian_;
};

}  // namespace pemsim
