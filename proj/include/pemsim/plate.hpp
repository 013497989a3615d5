#pragma once

// Physical plate/actuator parameters and the dimensionless groups that
// govern the coupled plate + analog-circuit model. All derivations keep
// SI inputs; simulation itself runs in the dimensionless system.

namespace pemsim {

/// Kirchhoff-Love plate material and scaling parameters (SI).
struct PlateParams {
    double rho;  ///< mass density [kg/m^3]
    double E;    ///< Young modulus [Pa]
    double h;    ///< thickness [m]
    double a;    ///< plate edge length [m]
    double l0;   ///< characteristic length [m]
    double t0;   ///< characteristic time [s]

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Thin-plate regime check (h/a < 0.1). Violation is a warning, not an error.
    bool is_thin_plate() const { return h / a < 0.1; }
};

/// Square piezoelectric actuator constitutive coefficients.
///
/// The bending moments and stored charge follow
///   M_xx = g_mm u_xx + g_12 u_yy - (g_em/b) v
///   M_yy = g_12 u_xx + g_mm u_yy - (g_em/b) v
///   Q    = b g_em (u_xx + u_yy) + g_ee v
/// g_mm and g_12 are carried for completeness; the coupled model neglects
/// the actuator's own bending stiffness, so only g_em and g_ee enter the
/// dimensionless groups.
struct ActuatorParams {
    double g_mm;  ///< purely mechanical bending coefficient
    double g_12;  ///< mechanical cross coefficient
    double g_em;  ///< electromechanical coupling coefficient
    double g_ee;  ///< purely electric (capacitive) coefficient [F]
    double b;     ///< actuator edge length [m]

    void validate() const;
};

/// Dimensionless groups plus the circuit scaling constants that house them.
struct DimensionlessGroups {
    double alpha = 0.0;  ///< inertia group, 3 rho l0^4 / (h^2 E t0^2)
    double beta = 0.0;   ///< coupling group, 3 l0 g_em / (b h^3 E)
    double gamma = 0.0;  ///< dissipation group, L / (t0 R eps^4)
    double eps = 0.0;    ///< dimensionless sampling step
    double L = 0.0;      ///< circuit inductance [H]
    double C = 0.0;      ///< circuit capacitance [F]
    double R0 = 0.0;     ///< characteristic resistance
    double t0 = 0.0;     ///< characteristic time [s] (scaling constant)
    double v0 = 0.0;     ///< characteristic voltage [V]
};

struct AlphaBeta {
    double alpha;
    double beta;
};

/// Inertia and coupling groups from physical inputs.
AlphaBeta derive_alpha_beta(const PlateParams& plate, const ActuatorParams& act);

/// The L*C product the analogy demands: 3 rho l0^4 eps^4 / (h^2 E).
double required_lc_product(const PlateParams& plate, double eps);

/// Characteristic voltage that matches the two coupling coefficients:
/// v0 = l0 * (b/l0) * sqrt(2 h rho / g_ee).
double characteristic_voltage(const PlateParams& plate, const ActuatorParams& act);

/// Circuit element values for the analog.
///
/// Default path: L = alpha eps^4 R0 t0 and C = t0/R0, which satisfy the
/// L*C analogy product by construction. With use_actuator_capacitance the
/// actuator supplies the capacitance (C = g_ee) and the inductance follows
/// from the same product, L = required_lc_product / g_ee.
DimensionlessGroups derive_circuit_values(const PlateParams& plate,
                                          const ActuatorParams& act,
                                          double eps, double R0,
                                          bool use_actuator_capacitance = false);

/// Dissipation group for a shunt resistance R: gamma = L / (t0 R eps^4).
double derive_gamma(const DimensionlessGroups& groups, double R);

}  // namespace pemsim
