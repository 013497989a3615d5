#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

#include "pemsim/grid.hpp"
#include "pemsim/pem.hpp"
#include "pemsim/plate.hpp"

namespace pemsim {

/// One plane-wave sample of the coupled dispersion relation. The two
/// branches split symmetrically around the uncoupled plate branch; their
/// field-amplitude ratios are +-i (unit modulus, quarter-period phase).
struct DispersionPoint {
    double k = 0.0;
    double omega_fast = 0.0;
    double omega_slow = 0.0;
    double vp_fast = 0.0;
    double vp_slow = 0.0;
    std::complex<double> amp_ratio_fast;  ///< deflection over voltage-integral amplitude
    std::complex<double> amp_ratio_slow;
};

/// Positive roots of alpha w^2 -+ beta k^2 w - k^4 = 0 and the associated
/// amplitude ratios. Requires k > 0, alpha > 0, beta >= 0.
DispersionPoint dispersion(double k, double alpha, double beta);

/// Double sine mode indexed by (m, n). k2 is the (positive) Laplacian
/// eigenvalue, either the continuous (m pi)^2 + (n pi)^2 or the discrete
/// counterpart mu_m + mu_n of the grid operator.
struct Mode {
    int m = 1;
    int n = 1;
    double k2 = 0.0;

    static Mode continuous(int m, int n);
    static Mode discrete(int m, int n, const GridSpec& grid);
};

/// 1-D second-difference eigenvalue mu_m = 2 (1 - cos(m pi eps)) / eps^2.
double laplace_eigenvalue_1d(int m, const GridSpec& grid);

/// Grid samples of the (m, n) sine mode, normalized so that
/// eps^2 * |shape|^2 = 1 (discrete orthonormal family).
Eigen::VectorXd mode_shape(const GridSpec& grid, int m, int n);

/// Coefficients of the field in the orthonormal sine basis.
std::vector<double> modal_project(const Eigen::VectorXd& field, std::span<const Mode> modes,
                                  const GridSpec& grid);
Eigen::VectorXd modal_reconstruct(std::span<const double> coeffs, std::span<const Mode> modes,
                                  const GridSpec& grid);

/// Per-mode reduced dynamics
///   p'' = -w0^2 p - g q',   q'' = -w0^2 q + g p' - (gamma/alpha) q'
/// with w0^2 = k2^2/alpha and g = beta k2 / alpha, state (p, p', q, q').
Eigen::Matrix4d mode_system_matrix(const Mode& mode, const PEMParams& params);

/// Max real part of the eigenvalues (spectral abscissa).
double spectral_abscissa(const Eigen::Matrix4d& A);

struct ModeInit {
    double p0 = 0.0;
    double p_dot0 = 0.0;
    double q0 = 0.0;
    double q_dot0 = 0.0;
};

struct ModeTrajectory {
    std::vector<double> t;
    std::vector<double> p, p_dot, q, q_dot;
    std::vector<double> mech_energy, elec_energy, total_energy;
    double decay_rate = 0.0;        ///< slowest pole real part, <= 0
    bool used_expm_fallback = false;  ///< eigenbasis was too ill-conditioned
};

/// Closed-form evolution of the per-mode system by eigendecomposition of
/// its 4x4 matrix, sampled uniformly over [0, t_span]. Falls back to dense
/// matrix-exponential stepping near defective parameter points.
ModeTrajectory mode_evolution(const Mode& mode, const PEMParams& params, const ModeInit& init,
                              double t_span, int samples);

struct ResistanceOptimum {
    double R_star = 0.0;
    double gamma_star = 0.0;
    double decay_rate_star = 0.0;  ///< spectral abscissa at R_star
    bool interior = false;         ///< optimum strictly inside the bounds
    int evaluations = 0;
};

/// Golden-section search on log R for the shunt resistance that makes the
/// slowest per-mode pole decay fastest. gamma(R) comes from the circuit
/// groups; bounds must span at least four decades.
ResistanceOptimum optimize_resistance(const Mode& mode, const DimensionlessGroups& groups,
                                      double R_min, double R_max);

}  // namespace pemsim
