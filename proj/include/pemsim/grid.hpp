#pragma once

#include <stdexcept>
#include <string>

namespace pemsim {

/// Uniform square sampling of the unit square. Only the n x n interior
/// nodes are stored; boundary values are eliminated into the operators.
/// Grid coordinates (i, j) are 1-based, x_i = i * eps with eps = 1/(n+1).
struct GridSpec {
    int n;       ///< interior nodes per side
    double eps;  ///< sampling step, defined as exactly 1.0/(n+1)

    explicit GridSpec(int n_) : n(n_), eps(1.0 / (n_ + 1)) {
        if (n_ < 1) throw std::invalid_argument("grid n must be >= 1");
    }

    int node_count() const { return n * n; }

    /// Row-major index of interior node (i, j), both in 1..n.
    int index(int i, int j) const { return (i - 1) * n + (j - 1); }

    bool is_interior(int i, int j) const { return i >= 1 && i <= n && j >= 1 && j <= n; }
    bool is_boundary(int i, int j) const {
        return (i == 0 || i == n + 1 || j == 0 || j == n + 1) &&
               i >= 0 && i <= n + 1 && j >= 0 && j <= n + 1;
    }

    double x(int i) const { return i * eps; }
};

enum class BoundaryCondition {
    Clamped,          ///< u = 0 and du/dn = 0 on the boundary
    SimplySupported,  ///< u = 0 and d2u/dn2 = 0 on the boundary
};

inline const char* to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Clamped ? "clamped" : "simply_supported";
}

inline BoundaryCondition boundary_condition_from_string(const std::string& s) {
    if (s == "clamped") return BoundaryCondition::Clamped;
    if (s == "simply_supported") return BoundaryCondition::SimplySupported;
    throw std::invalid_argument("unknown boundary condition '" + s +
                                "' (expected clamped or simply_supported)");
}

}  // namespace pemsim
