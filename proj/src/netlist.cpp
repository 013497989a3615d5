#include "pemsim/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pemsim {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("malformed number '" + s + "' in netlist");
    }
    return v;
}

}  // namespace

const char* to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Axial: return "axial";
        case EdgeKind::Diagonal: return "diagonal";
        case EdgeKind::SecondAxial: return "second_axial";
        case EdgeKind::Ground: return "ground";
    }
    return "?";
}

AnalogElementValues identify_edge_admittances(double eps, double alpha, double R0, double t0) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("degenerate eps");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(R0 > 0.0)) throw std::invalid_argument("R0 must be positive");
    if (!(t0 > 0.0)) throw std::invalid_argument("t0 must be positive");

    // Nodal balance against the (20, -8, +2, +1)/eps^4 stencil: edge
    // admittances 8, -2, -1 over s*eps^4, ground admittance alpha*s.
    const double L_base = alpha * (eps * eps * eps * eps) * R0 * t0;
    AnalogElementValues v;
    v.L_axial = L_base / 8.0;
    v.L_diag = -L_base / 2.0;
    v.L_second = -L_base;
    v.C_ground = t0 / R0;
    v.eps = eps;
    v.alpha = alpha;
    v.R0 = R0;
    v.t0 = t0;
    return v;
}

GICRealization GICRealization::negative_inductor(double inductance_magnitude,
                                                 double resistor_scale) {
    if (!(inductance_magnitude > 0.0) || !(resistor_scale > 0.0)) {
        throw std::domain_error("negative_inductor needs positive magnitude and resistor scale");
    }
    GICRealization g;
    const double cap = inductance_magnitude / (resistor_scale * resistor_scale);
    g.z = {Branch{BranchKind::Resistor, resistor_scale}, Branch{BranchKind::Capacitor, cap},
           Branch{BranchKind::Resistor, resistor_scale}, Branch{BranchKind::Resistor, resistor_scale},
           Branch{BranchKind::Resistor, resistor_scale}};
    g.inverted = true;
    return g;
}

ImpedanceResult verify_gic(const GICRealization& gic) {
    std::array<RationalFunction, 5> y;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& b = gic.z[i];
        if (!(b.value > 0.0) || !std::isfinite(b.value)) {
            throw std::domain_error("non-realizable GIC branch " + std::to_string(i + 1));
        }
        if (b.kind == GICRealization::BranchKind::Resistor) {
            y[i] = RationalFunction::constant(1.0 / b.value);
        } else {
            y[i] = RationalFunction(Polynomial::monomial(b.value, 1), Polynomial::constant(1.0));
        }
    }

    // Ideal-op-amp nodal analysis of the ladder p - Z1 - Z2 - Z3 - Z4 - Z5 - ref.
    // The virtual shorts pin the Z2/Z3 junction and the Z5 top to the port
    // voltage; the op-amp outputs drive the other two internal nodes. Unit
    // port drive, eliminate node by node.
    const RationalFunction one = RationalFunction::constant(1.0);
    const RationalFunction v4 = one + y[4] / y[3];          // KCL at the Z4/Z5 node
    const RationalFunction v2 = one + (y[2] / y[1]) * (one - v4);  // KCL at the Z2/Z3 node
    const RationalFunction i_in = y[0] * (one - v2);
    if (i_in.is_zero()) throw std::domain_error("singular GIC nodal system");

    ImpedanceResult r;
    r.z_in = one / i_in;
    if (gic.inverted) r.z_in = RationalFunction::constant(-1.0) * r.z_in;

    const int nd = r.z_in.num.degree();
    const int dd = r.z_in.den.degree();
    r.resistive = nd == 0 && dd == 0;
    r.inductive = nd == 1 && dd == 0 && r.z_in.num.coeff(0) == 0.0;
    if (r.inductive) r.equivalent_inductance = r.z_in.num.coeff(1) / r.z_in.den.coeff(0);
    return r;
}

namespace {

struct Offset {
    int di, dj;
    EdgeKind kind;
};

constexpr Offset kEdgeOffsets[] = {
    {1, 0, EdgeKind::Axial},        {-1, 0, EdgeKind::Axial},
    {0, 1, EdgeKind::Axial},        {0, -1, EdgeKind::Axial},
    {1, 1, EdgeKind::Diagonal},     {1, -1, EdgeKind::Diagonal},
    {-1, 1, EdgeKind::Diagonal},    {-1, -1, EdgeKind::Diagonal},
    {2, 0, EdgeKind::SecondAxial},  {-2, 0, EdgeKind::SecondAxial},
    {0, 2, EdgeKind::SecondAxial},  {0, -2, EdgeKind::SecondAxial},
};

double edge_value(const AnalogElementValues& v, EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Axial: return v.L_axial;
        case EdgeKind::Diagonal: return v.L_diag;
        case EdgeKind::SecondAxial: return v.L_second;
        default: throw std::logic_error("no element value for ground edges");
    }
}

}  // namespace

Netlist build_netlist(const AnalogElementValues& values, const GridSpec& grid,
                      BoundaryCondition bc, bool expand_negatives) {
    if (grid.n < 5) {
        throw std::invalid_argument("grid too small for second-axial edges (need n >= 5)");
    }
    const int n = grid.n;

    Netlist nl;
    nl.grid_n = n;
    nl.bc = bc;
    nl.values = values;
    nl.node_names.reserve(static_cast<std::size_t>(grid.node_count()));
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            nl.node_names.push_back("N" + std::to_string(i) + "_" + std::to_string(j));
        }
    }

    for (int idx = 0; idx < grid.node_count(); ++idx) {
        nl.components.push_back(Component{ComponentKind::Capacitor, values.C_ground, idx,
                                          Netlist::kGround, EdgeKind::Ground, "ground_cap"});
    }

    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const int a = grid.index(i, j);
            for (const auto& off : kEdgeOffsets) {
                const int ii = i + off.di, jj = j + off.dj;
                const double value = edge_value(values, off.kind);
                if (grid.is_interior(ii, jj)) {
                    // undirected edge, emitted from the lower-index endpoint
                    if (off.di > 0 || (off.di == 0 && off.dj > 0)) {
                        nl.components.push_back(Component{ComponentKind::Inductor, value, a,
                                                          grid.index(ii, jj), off.kind,
                                                          to_string(off.kind)});
                    }
                } else if (grid.is_boundary(ii, jj)) {
                    // boundary node is held at zero voltage, i.e. ground
                    nl.components.push_back(Component{ComponentKind::Inductor, value, a,
                                                      Netlist::kGround, off.kind,
                                                      std::string(to_string(off.kind)) +
                                                          "_boundary"});
                } else {
                    // ghost node one layer outside; reflection folds it onto
                    // this node. Clamped: equal voltages, no current, edge
                    // dropped. Simply supported: opposite voltage, the edge
                    // sees twice the drop, half the inductance to ground.
                    if (bc == BoundaryCondition::SimplySupported) {
                        nl.components.push_back(Component{ComponentKind::Inductor, value / 2.0, a,
                                                          Netlist::kGround, off.kind,
                                                          std::string(to_string(off.kind)) +
                                                              "_fold"});
                    }
                }
            }
        }
    }

    if (expand_negatives) {
        nl.expanded = true;
        std::map<double, std::string> by_value;
        for (auto& c : nl.components) {
            if (c.kind != ComponentKind::Inductor || c.value >= 0.0) continue;
            auto it = by_value.find(c.value);
            if (it == by_value.end()) {
                const std::string name = "NEGL" + std::to_string(nl.subcircuits.size() + 1);
                nl.subcircuits.emplace_back(
                    name, GICRealization::negative_inductor(-c.value, values.R0));
                it = by_value.emplace(c.value, name).first;
            }
            c.kind = ComponentKind::Subcircuit;
            c.label = it->second + " " + c.label;
        }
    }
    return nl;
}

std::size_t Netlist::count_kind(EdgeKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        components.begin(), components.end(),
        [kind](const Component& c) { return c.edge == kind; }));
}

std::size_t Netlist::count_interior_edges(EdgeKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(components.begin(), components.end(), [kind](const Component& c) {
            return c.edge == kind && c.node_a != kGround && c.node_b != kGround;
        }));
}

namespace {

std::string spice_node(const Netlist& nl, int idx) {
    return idx == Netlist::kGround ? "0" : nl.node_names[static_cast<std::size_t>(idx)];
}

void emit_subckt(std::ostream& os, const std::string& name, const GICRealization& g) {
    auto branch = [&](int k, const char* na, const char* nb, int& rc, int& cc) {
        const auto& b = g.z[static_cast<std::size_t>(k)];
        if (b.kind == GICRealization::BranchKind::Resistor) {
            os << "R" << ++rc << " " << na << " " << nb << " " << fmt(b.value) << "\n";
        } else {
            os << "C" << ++cc << " " << na << " " << nb << " " << fmt(b.value) << "\n";
        }
    };
    os << ".SUBCKT " << name << " p ref\n";
    int rc = 0, cc = 0;
    if (g.inverted) {
        double r_inic = 1000.0;
        for (const auto& b : g.z) {
            if (b.kind == GICRealization::BranchKind::Resistor) {
                r_inic = b.value;
                break;
            }
        }
        // current-inversion stage wrapped around the converter port m
        os << "R" << ++rc << " p o " << fmt(r_inic) << "\n";
        os << "R" << ++rc << " m o " << fmt(r_inic) << "\n";
        os << "E1 o ref p m 1e9\n";
    }
    const char* port = g.inverted ? "m" : "p";
    branch(0, port, "n1", rc, cc);
    branch(1, "n1", "n2", rc, cc);
    branch(2, "n2", "n3", rc, cc);
    branch(3, "n3", "n4", rc, cc);
    branch(4, "n4", "ref", rc, cc);
    os << "E2 n1 ref " << port << " n2 1e9\n";
    os << "E3 n3 ref n4 n2 1e9\n";
    os << ".ENDS " << name << "\n";
}

}  // namespace

std::string Netlist::to_spice() const {
    std::ostringstream os;
    os << "* plate electric analog\n";
    os << "* grid_n=" << grid_n << " bc=" << pemsim::to_string(bc)
       << " expanded=" << (expanded ? 1 : 0) << "\n";
    os << "* ident eps=" << fmt(values.eps) << " alpha=" << fmt(values.alpha)
       << " R0=" << fmt(values.R0) << " t0=" << fmt(values.t0) << "\n";
    os << "* elem L_axial=" << fmt(values.L_axial) << " L_diag=" << fmt(values.L_diag)
       << " L_second=" << fmt(values.L_second) << " C_ground=" << fmt(values.C_ground) << "\n";
    for (const auto& [name, gic] : subcircuits) emit_subckt(os, name, gic);
    int card = 0;
    for (const auto& c : components) {
        ++card;
        switch (c.kind) {
            case ComponentKind::Capacitor:
                os << "C" << card << " " << spice_node(*this, c.node_a) << " "
                   << spice_node(*this, c.node_b) << " " << fmt(c.value) << " ; " << c.label
                   << "\n";
                break;
            case ComponentKind::Inductor:
                os << "L" << card << " " << spice_node(*this, c.node_a) << " "
                   << spice_node(*this, c.node_b) << " " << fmt(c.value) << " ; " << c.label
                   << "\n";
                break;
            case ComponentKind::Resistor:
                os << "R" << card << " " << spice_node(*this, c.node_a) << " "
                   << spice_node(*this, c.node_b) << " " << fmt(c.value) << " ; " << c.label
                   << "\n";
                break;
            case ComponentKind::Subcircuit:
                // label starts with the subcircuit name
                os << "X" << card << " " << spice_node(*this, c.node_a) << " "
                   << spice_node(*this, c.node_b) << " " << c.label << "\n";
                break;
        }
    }
    os << ".END\n";
    return os.str();
}

namespace {

std::map<std::string, std::string> parse_kv(std::istringstream& ls) {
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

EdgeKind edge_from_label(const std::string& label) {
    if (label.rfind("ground", 0) == 0) return EdgeKind::Ground;
    if (label.rfind("axial", 0) == 0) return EdgeKind::Axial;
    if (label.rfind("diagonal", 0) == 0) return EdgeKind::Diagonal;
    if (label.rfind("second_axial", 0) == 0) return EdgeKind::SecondAxial;
    throw std::invalid_argument("unknown edge label '" + label + "'");
}

}  // namespace

Netlist Netlist::from_spice(const std::string& text) {
    Netlist nl;
    std::map<std::string, int> node_index;
    std::istringstream is(text);
    std::string line;
    bool have_grid = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '*') {
            std::istringstream ls(line.substr(1));
            auto kv = parse_kv(ls);
            if (kv.count("grid_n")) {
                nl.grid_n = std::stoi(kv["grid_n"]);
                nl.bc = boundary_condition_from_string(kv["bc"]);
                if (kv["expanded"] == "1") {
                    throw std::invalid_argument("expanded netlists are not parseable");
                }
                have_grid = true;
                for (int i = 1; i <= nl.grid_n; ++i) {
                    for (int j = 1; j <= nl.grid_n; ++j) {
                        std::string name = "N" + std::to_string(i) + "_" + std::to_string(j);
                        node_index[name] = static_cast<int>(nl.node_names.size());
                        nl.node_names.push_back(name);
                    }
                }
            } else if (kv.count("eps")) {
                nl.values.eps = parse_double(kv["eps"]);
                nl.values.alpha = parse_double(kv["alpha"]);
                nl.values.R0 = parse_double(kv["R0"]);
                nl.values.t0 = parse_double(kv["t0"]);
            } else if (kv.count("L_axial")) {
                nl.values.L_axial = parse_double(kv["L_axial"]);
                nl.values.L_diag = parse_double(kv["L_diag"]);
                nl.values.L_second = parse_double(kv["L_second"]);
                nl.values.C_ground = parse_double(kv["C_ground"]);
            }
            continue;
        }
        if (line[0] == '.') {
            if (line.rfind(".SUBCKT", 0) == 0) {
                throw std::invalid_argument("expanded netlists are not parseable");
            }
            if (line.rfind(".END", 0) == 0) break;
            continue;
        }
        if (!have_grid) throw std::invalid_argument("netlist missing grid metadata");

        std::istringstream ls(line);
        std::string name, na, nb, value, semi, label;
        if (!(ls >> name >> na >> nb >> value >> semi >> label) || semi != ";") {
            throw std::invalid_argument("malformed card: " + line);
        }
        auto node = [&](const std::string& s) {
            if (s == "0") return kGround;
            auto it = node_index.find(s);
            if (it == node_index.end()) throw std::invalid_argument("unknown node " + s);
            return it->second;
        };
        Component c;
        switch (name[0]) {
            case 'C': c.kind = ComponentKind::Capacitor; break;
            case 'L': c.kind = ComponentKind::Inductor; break;
            case 'R': c.kind = ComponentKind::Resistor; break;
            default: throw std::invalid_argument("unsupported card: " + line);
        }
        c.node_a = node(na);
        c.node_b = node(nb);
        c.value = parse_double(value);
        c.label = label;
        c.edge = edge_from_label(label);
        nl.components.push_back(std::move(c));
    }
    if (!have_grid) throw std::invalid_argument("netlist missing grid metadata");
    return nl;
}

AnalogVerification verify_analog(const Netlist& netlist, const SparseOperator& biharmonic,
                                 double alpha) {
    if (netlist.expanded) {
        throw std::invalid_argument("verify_analog needs an unexpanded netlist");
    }
    const int dim = netlist.grid_n * netlist.grid_n;
    if (dim <= 0 || dim != biharmonic.dimension()) {
        throw std::invalid_argument("netlist/operator dimension mismatch");
    }

    const double eps = netlist.values.eps;
    const double eps4 = eps * eps * eps * eps;
    const double ind_scale = alpha * netlist.values.R0 * netlist.values.t0;
    const double cap_scale = alpha * netlist.values.R0 / netlist.values.t0;

    // Dimensionless nodal coefficients: the 1/s part should reproduce the
    // biharmonic rows, the s part should sit at alpha on every diagonal.
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd cap = Eigen::VectorXd::Zero(dim);
    for (const auto& c : netlist.components) {
        switch (c.kind) {
            case ComponentKind::Capacitor: {
                const int node = c.node_a == Netlist::kGround ? c.node_b : c.node_a;
                cap[node] += cap_scale * c.value;
                break;
            }
            case ComponentKind::Inductor: {
                const double y = ind_scale / c.value;
                if (c.node_a != Netlist::kGround) trips.emplace_back(c.node_a, c.node_a, y);
                if (c.node_b != Netlist::kGround) trips.emplace_back(c.node_b, c.node_b, y);
                if (c.node_a != Netlist::kGround && c.node_b != Netlist::kGround) {
                    trips.emplace_back(c.node_a, c.node_b, -y);
                    trips.emplace_back(c.node_b, c.node_a, -y);
                }
                break;
            }
            default:
                throw std::invalid_argument("unexpected component kind in analog netlist");
        }
    }
    Eigen::SparseMatrix<double> nodal(dim, dim);
    nodal.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseMatrix<double> diff = nodal - biharmonic.matrix();

    AnalogVerification rep;
    rep.row_mismatch.assign(static_cast<std::size_t>(dim), 0.0);
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) {
            const double m = std::abs(it.value()) * eps4;  // stencil units
            rep.inductive_mismatch = std::max(rep.inductive_mismatch, m);
            auto& rm = rep.row_mismatch[static_cast<std::size_t>(it.row())];
            rm = std::max(rm, m);
        }
    }
    for (int i = 0; i < dim; ++i) {
        const double m = std::abs(cap[i] - alpha) / alpha;
        rep.capacitive_mismatch = std::max(rep.capacitive_mismatch, m);
        auto& rm = rep.row_mismatch[static_cast<std::size_t>(i)];
        rm = std::max(rm, m);
    }
    rep.max_mismatch = std::max(rep.inductive_mismatch, rep.capacitive_mismatch);
    rep.worst_row = static_cast<int>(
        std::max_element(rep.row_mismatch.begin(), rep.row_mismatch.end()) -
        rep.row_mismatch.begin());
    return rep;
}

}  // namespace pemsim
