#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pemsim/grid.hpp"
#include "pemsim/operators.hpp"
#include "pemsim/sdomain.hpp"

namespace pemsim {

/// Grid relationship realized by a circuit edge.
enum class EdgeKind {
    Axial,        ///< nearest neighbor, i+-1 or j+-1
    Diagonal,     ///< i+-1 and j+-1
    SecondAxial,  ///< i+-2 or j+-2
    Ground,       ///< node-to-ground element
};

const char* to_string(EdgeKind kind);

/// Element values of the analog cell. Axial edges carry positive
/// inductors; diagonal and second-axial edges require negative ones.
/// The identification inputs are carried along for verification.
struct AnalogElementValues {
    double L_axial;    ///< [H], > 0
    double L_diag;     ///< [H], < 0
    double L_second;   ///< [H], < 0
    double C_ground;   ///< [F], > 0

    // identification inputs
    double eps;
    double alpha;
    double R0;
    double t0;

    bool operator==(const AnalogElementValues&) const = default;
};

/// Matches the nodal balance of the lumped network against the 13-point
/// plate stencil. With L_base = alpha * eps^4 * R0 * t0 the dimensionless
/// edge admittances 8, -2, -1 (times 1/(s eps^4)) map to inductances
/// L_base/8, -L_base/2, -L_base, and the ground capacitance is t0/R0.
AnalogElementValues identify_edge_admittances(double eps, double alpha, double R0, double t0);

/// Antoniou-style generalized impedance converter: five branch impedances
/// chained from the port to the reference, two ideal op-amps, and an
/// optional current-inversion stage. Input impedance Z1*Z3*Z5/(Z2*Z4),
/// negated when the inversion stage is present.
struct GICRealization {
    enum class BranchKind { Resistor, Capacitor };
    struct Branch {
        BranchKind kind;
        double value;  ///< ohms or farads

        bool operator==(const Branch&) const = default;
    };

    std::array<Branch, 5> z;
    bool inverted = false;

    /// Equal-resistor realization of -L: the capacitor sits in branch 2
    /// (C = L / R^2) and the inversion stage provides the sign.
    static GICRealization negative_inductor(double inductance_magnitude, double resistor_scale);

    bool operator==(const GICRealization&) const = default;
};

struct ImpedanceResult {
    RationalFunction z_in;         ///< includes the inversion sign
    bool inductive = false;        ///< z_in = s * L_eq
    bool resistive = false;        ///< z_in constant
    double equivalent_inductance = 0.0;
};

/// Two-terminal input impedance of the GIC by ideal-op-amp nodal analysis,
/// returned as a rational function of s. Throws std::domain_error for
/// non-realizable branch values.
ImpedanceResult verify_gic(const GICRealization& gic);

enum class ComponentKind { Inductor, Capacitor, Resistor, Subcircuit };

struct Component {
    ComponentKind kind;
    double value;  ///< element value; for Subcircuit the realized inductance
    int node_a;    ///< interior node index, or Netlist::kGround
    int node_b;
    EdgeKind edge;
    std::string label;

    bool operator==(const Component&) const = default;
};

/// Lumped analog of the plate on one grid: a capacitor per node plus an
/// inductor per stencil edge. Edges reaching the boundary land on ground;
/// edges reaching a ghost node fold per the boundary-condition reflection
/// (clamped drops them, simply supported doubles the admittance to ground).
struct Netlist {
    static constexpr int kGround = -1;

    int grid_n = 0;
    BoundaryCondition bc = BoundaryCondition::SimplySupported;
    AnalogElementValues values{};
    std::vector<std::string> node_names;  ///< row-major, "N<i>_<j>"
    std::vector<Component> components;
    bool expanded = false;
    std::vector<std::pair<std::string, GICRealization>> subcircuits;

    std::size_t count_kind(EdgeKind kind) const;
    std::size_t count_interior_edges(EdgeKind kind) const;  ///< node-to-node only

    /// SPICE-compatible card listing (UTF-8, LF). Lossless for unexpanded
    /// netlists via from_spice.
    std::string to_spice() const;
    static Netlist from_spice(const std::string& text);

    bool operator==(const Netlist&) const = default;
};

Netlist build_netlist(const AnalogElementValues& values, const GridSpec& grid,
                      BoundaryCondition bc, bool expand_negatives);

/// Outcome of checking the netlist's nodal equations against the plate
/// operator rows. Mismatches are reported in dimensionless stencil units:
/// the 1/s (inductive) part is compared entrywise against eps^4 * B and
/// the s (capacitive) part against alpha, relative to alpha.
struct AnalogVerification {
    double max_mismatch = 0.0;
    double inductive_mismatch = 0.0;
    double capacitive_mismatch = 0.0;
    int worst_row = -1;
    std::vector<double> row_mismatch;
};

/// Requires an unexpanded netlist whose grid matches the operator.
AnalogVerification verify_analog(const Netlist& netlist, const SparseOperator& biharmonic,
                                 double alpha);

}  // namespace pemsim
