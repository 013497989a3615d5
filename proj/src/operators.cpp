#include "pemsim/operators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pemsim {

namespace {

std::string format_value(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

SparseOperator::SparseOperator(int dimension,
                               const std::vector<Eigen::Triplet<double>>& entries,
                               bool expect_symmetric)
    : mat_(dimension, dimension), symmetric_(expect_symmetric) {
    if (dimension < 1) throw std::invalid_argument("operator dimension must be >= 1");
    mat_.setFromTriplets(entries.begin(), entries.end());
    mat_.makeCompressed();
    if (expect_symmetric) {
        Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(mat_.transpose()) - mat_;
        double worst = 0.0;
        for (int k = 0; k < diff.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
                worst = std::max(worst, std::abs(it.value()));
            }
        }
        if (worst != 0.0) {
            throw std::logic_error("operator expected symmetric, max asymmetry " +
                                   format_value(worst));
        }
    }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& v) const {
    if (v.size() != mat_.rows()) {
        throw std::invalid_argument("operator/vector dimension mismatch");
    }
    return mat_ * v;
}

void SparseOperator::write_coordinate(std::ostream& os) const {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(mat_.nonZeros()));
    for (int k = 0; k < mat_.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat_, k); it; ++it) {
            entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                 it.value());
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
    for (const auto& t : entries) {
        os << t.row() << ' ' << t.col() << ' ' << format_value(t.value()) << '\n';
    }
}

SparseOperator SparseOperator::read_coordinate(std::istream& is, bool expect_symmetric) {
    std::vector<Eigen::Triplet<double>> entries;
    int max_index = -1;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int r = 0, c = 0;
        double v = 0.0;
        if (!(ls >> r >> c >> v)) {
            throw std::invalid_argument("malformed coordinate line: " + line);
        }
        if (r < 0 || c < 0) throw std::invalid_argument("negative index in coordinate line");
        entries.emplace_back(r, c, v);
        max_index = std::max({max_index, r, c});
    }
    if (max_index < 0) throw std::invalid_argument("empty coordinate stream");
    return SparseOperator(max_index + 1, entries, expect_symmetric);
}

namespace {

// Classifies a stencil target. Boundary nodes carry u = 0 and are dropped;
// ghost nodes one layer outside fold back onto their mirror interior node.
enum class Target { Interior, Boundary, Ghost };

Target classify(int c, int n) {
    if (c >= 1 && c <= n) return Target::Interior;
    if (c == 0 || c == n + 1) return Target::Boundary;
    return Target::Ghost;
}

int mirror(int c, int n) { return c == -1 ? 1 : (c == n + 2 ? n : c); }

}  // namespace

SparseOperator assemble_laplacian(const GridSpec& grid, BoundaryCondition /*bc*/) {
    const int n = grid.n;
    const double w = 1.0 / (grid.eps * grid.eps);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(grid.node_count()) * 5);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const int row = grid.index(i, j);
            entries.emplace_back(row, row, -4.0 * w);
            const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& d : off) {
                const int ii = i + d[0], jj = j + d[1];
                if (grid.is_interior(ii, jj)) {
                    entries.emplace_back(row, grid.index(ii, jj), w);
                }
            }
        }
    }
    return SparseOperator(grid.node_count(), entries, true);
}

SparseOperator assemble_biharmonic(const GridSpec& grid, BoundaryCondition bc) {
    const int n = grid.n;
    if (n < 5) throw std::invalid_argument("biharmonic stencil requires grid n >= 5");
    const double eps2 = grid.eps * grid.eps;
    const double w = 1.0 / (eps2 * eps2);
    const double ghost_sign = bc == BoundaryCondition::Clamped ? 1.0 : -1.0;

    struct Offset {
        int di, dj;
        double coeff;
    };
    static constexpr Offset stencil[] = {
        {0, 0, 20.0},                                              // center
        {1, 0, -8.0},  {-1, 0, -8.0}, {0, 1, -8.0}, {0, -1, -8.0}, // axial
        {1, 1, 2.0},   {1, -1, 2.0},  {-1, 1, 2.0}, {-1, -1, 2.0}, // diagonal
        {2, 0, 1.0},   {-2, 0, 1.0},  {0, 2, 1.0},  {0, -2, 1.0},  // second axial
    };

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(grid.node_count()) * 13);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const int row = grid.index(i, j);
            for (const auto& s : stencil) {
                const int ii = i + s.di, jj = j + s.dj;
                const Target ti = classify(ii, n);
                const Target tj = classify(jj, n);
                if (ti == Target::Boundary || tj == Target::Boundary) continue;
                double coeff = s.coeff;
                int ci = ii, cj = jj;
                if (ti == Target::Ghost) {
                    ci = mirror(ii, n);
                    coeff *= ghost_sign;
                }
                if (tj == Target::Ghost) {
                    cj = mirror(jj, n);
                    coeff *= ghost_sign;
                }
                entries.emplace_back(row, grid.index(ci, cj), coeff * w);
            }
        }
    }
    return SparseOperator(grid.node_count(), entries, true);
}

ConvergenceStudy estimate_convergence_order(
    const std::function<double(double, double)>& field,
    const std::function<double(double, double)>& exact_biharmonic,
    BoundaryCondition bc, std::span<const int> grid_sizes) {
    if (grid_sizes.size() < 3) {
        throw std::invalid_argument("convergence study needs at least 3 refinement levels");
    }

    ConvergenceStudy study;
    study.exact = true;
    for (int n : grid_sizes) {
        GridSpec grid(n);
        SparseOperator op = assemble_biharmonic(grid, bc);
        Eigen::VectorXd u(grid.node_count());
        double max_abs_u = 0.0;
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                u[grid.index(i, j)] = field(grid.x(i), grid.x(j));
                max_abs_u = std::max(max_abs_u, std::abs(u[grid.index(i, j)]));
            }
        }
        Eigen::VectorXd bu = op.apply(u);
        double max_err = 0.0;
        for (int i = 3; i <= n - 2; ++i) {
            for (int j = 3; j <= n - 2; ++j) {
                const double res = bu[grid.index(i, j)] - exact_biharmonic(grid.x(i), grid.x(j));
                max_err = std::max(max_err, std::abs(res));
            }
        }
        study.samples.push_back({grid.eps, max_err});

        // Roundoff floor for a field the stencil reproduces exactly. The
        // absolute-coefficient sum of the stencil is 64/eps^4.
        const double eps4 = grid.eps * grid.eps * grid.eps * grid.eps;
        const double floor = 1e-11 * (64.0 / eps4) * std::max(1.0, max_abs_u);
        if (max_err > floor) study.exact = false;
    }

    if (study.exact) {
        study.order = std::numeric_limits<double>::quiet_NaN();
        return study;
    }

    // Least-squares slope of log(error) against log(eps).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(study.samples.size());
    for (const auto& s : study.samples) {
        const double x = std::log(s.eps);
        const double y = std::log(std::max(s.max_error, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    study.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return study;
}

}  // namespace pemsim
