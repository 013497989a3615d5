#pragma once

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pemsim/grid.hpp"

namespace pemsim {

/// Immutable sparse operator on the interior grid vector.
class SparseOperator {
public:
    /// Builds from triplets. When expect_symmetric is set the structure is
    /// verified entrywise and a violation throws std::logic_error.
    SparseOperator(int dimension, const std::vector<Eigen::Triplet<double>>& entries,
                   bool expect_symmetric);

    int dimension() const { return static_cast<int>(mat_.rows()); }
    bool symmetric() const { return symmetric_; }

    const Eigen::SparseMatrix<double>& matrix() const { return mat_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

    /// Coordinate-format text, one "row col value" line per stored entry,
    /// 0-based indices, deterministic row-major order.
    void write_coordinate(std::ostream& os) const;
    static SparseOperator read_coordinate(std::istream& is, bool expect_symmetric = false);

private:
    Eigen::SparseMatrix<double> mat_;
    bool symmetric_;
};

/// 5-point Laplacian with Dirichlet boundary (u = 0), entries scaled by
/// 1/eps^2. Both boundary-condition families share it since the stencil
/// never reaches past the first boundary layer. Negative definite.
SparseOperator assemble_laplacian(const GridSpec& grid, BoundaryCondition bc);

/// 13-point biharmonic with interior coefficients (20, -8, +2, +1)/eps^4.
/// Ghost nodes one layer outside the boundary are eliminated by reflection:
/// clamped mirrors the interior value, simply supported negates it. The
/// result is symmetric positive definite; for simply supported it equals
/// the squared 5-point Laplacian. Requires n >= 5.
SparseOperator assemble_biharmonic(const GridSpec& grid, BoundaryCondition bc);

/// Residual study for the biharmonic stencil on a smooth field.
struct ConvergenceStudy {
    struct Sample {
        double eps;
        double max_error;  ///< max |B u - exact| over deep-interior nodes
    };
    std::vector<Sample> samples;
    double order;  ///< least-squares slope of log(error) vs log(eps); NaN when exact
    bool exact;    ///< all residuals at roundoff scale (stencil exact on the field)
};

/// Applies the assembled biharmonic to the sampled field on each grid and
/// measures the max-norm residual against the sampled exact biharmonic.
/// Residuals are taken over nodes at least two layers inside the boundary,
/// where the stencil involves no boundary data. Needs >= 3 grid sizes.
ConvergenceStudy estimate_convergence_order(
    const std::function<double(double, double)>& field,
    const std::function<double(double, double)>& exact_biharmonic,
    BoundaryCondition bc, std::span<const int> grid_sizes);

}  // namespace pemsim
