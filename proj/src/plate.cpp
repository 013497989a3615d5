#include "pemsim/plate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pemsim {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(field) + " must be positive and finite");
    }
}

}  // namespace

void PlateParams::validate() const {
    require_positive(rho, "rho");
    require_positive(E, "E");
    require_positive(h, "h");
    require_positive(a, "a");
    require_positive(l0, "l0");
    require_positive(t0, "t0");
}

void ActuatorParams::validate() const {
    if (!(g_ee > 0.0) || !std::isfinite(g_ee)) {
        throw std::invalid_argument("g_ee must be positive and finite");
    }
    require_positive(b, "b");
    if (!std::isfinite(g_mm) || !std::isfinite(g_12) || !std::isfinite(g_em)) {
        throw std::invalid_argument("actuator coefficients must be finite");
    }
}

AlphaBeta derive_alpha_beta(const PlateParams& plate, const ActuatorParams& act) {
    plate.validate();
    act.validate();
    const double l0_4 = plate.l0 * plate.l0 * plate.l0 * plate.l0;
    const double alpha =
        3.0 * plate.rho * l0_4 / (plate.h * plate.h * plate.E * plate.t0 * plate.t0);
    const double beta =
        3.0 * plate.l0 * act.g_em / (act.b * plate.h * plate.h * plate.h * plate.E);
    return {alpha, beta};
}

double required_lc_product(const PlateParams& plate, double eps) {
    plate.validate();
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("eps must lie in (0, 1)");
    }
    const double l0_4 = plate.l0 * plate.l0 * plate.l0 * plate.l0;
    const double eps4 = eps * eps * eps * eps;
    return 3.0 * plate.rho * l0_4 * eps4 / (plate.h * plate.h * plate.E);
}

double characteristic_voltage(const PlateParams& plate, const ActuatorParams& act) {
    plate.validate();
    act.validate();
    // Factors grouped as l0 * (b/l0) * sqrt(2 h rho / g_ee).
    return plate.l0 * (act.b / plate.l0) * std::sqrt(2.0 * plate.h * plate.rho / act.g_ee);
}

DimensionlessGroups derive_circuit_values(const PlateParams& plate,
                                          const ActuatorParams& act,
                                          double eps, double R0,
                                          bool use_actuator_capacitance) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("eps must lie in (0, 1)");
    }
    require_positive(R0, "R0");

    const AlphaBeta ab = derive_alpha_beta(plate, act);
    const double eps4 = eps * eps * eps * eps;

    DimensionlessGroups g;
    g.alpha = ab.alpha;
    g.beta = ab.beta;
    g.eps = eps;
    g.R0 = R0;
    g.t0 = plate.t0;
    g.v0 = characteristic_voltage(plate, act);

    if (use_actuator_capacitance) {
        if (!(act.g_ee > 0.0)) {
            throw std::invalid_argument("g_ee must be positive when the actuator supplies C");
        }
        g.C = act.g_ee;
        g.L = required_lc_product(plate, eps) / act.g_ee;
    } else {
        g.L = ab.alpha * eps4 * R0 * plate.t0;
        g.C = plate.t0 / R0;
    }
    return g;
}

double derive_gamma(const DimensionlessGroups& groups, double R) {
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("R must be positive and finite");
    }
    const double eps4 = groups.eps * groups.eps * groups.eps * groups.eps;
    return groups.L / (groups.t0 * R * eps4);
}

}  // namespace pemsim
