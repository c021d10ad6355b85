#include "mdm/circuit.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mdm {

namespace {

// Conductance stamp between two nodes, either of which may be pinned.
// Pinned-pinned pairs carry current but do not enter the free system.
void stamp(CsrBuilder& m, std::vector<double>& rhs, int a, double va, int b, double vb,
           double g) {
    if (a >= 0 && b >= 0) {
        m.add(a, a, g);
        m.add(b, b, g);
        m.add(a, b, -g);
        m.add(b, a, -g);
    } else if (a >= 0) {
        m.add(a, a, g);
        rhs[a] += g * vb;
    } else if (b >= 0) {
        m.add(b, b, g);
        rhs[b] += g * va;
    }
}

}  // namespace

MeshSystem build_mesh(const BitTile& tile, const ResistanceParams& params,
                      std::span<const double> row_volts) {
    tile.validate();
    params.validate();
    if (params.wire_r <= 0.0)
        throw std::invalid_argument(
            "mesh model needs wire_r > 0; ideal wires are served by the closed-form path");
    if (static_cast<int>(row_volts.size()) != tile.rows())
        throw std::invalid_argument("need one drive voltage per row");

    MeshSystem mesh;
    mesh.rows = tile.rows();
    mesh.cols = tile.cols();
    mesh.row_volts.assign(row_volts.begin(), row_volts.end());

    const int rows = mesh.rows, cols = mesh.cols;
    const double g_wire = 1.0 / params.wire_r;
    const double g_on = 1.0 / params.r_on;
    const double g_off = 1.0 / params.r_off;

    mesh.device_conductance.assign(static_cast<std::size_t>(rows) * cols, g_off);
    for (int j = 0; j < rows; ++j)
        for (int c = 0; c < cols; ++c)
            if (tile.active(j, c))
                mesh.device_conductance[static_cast<std::size_t>(j) * cols +
                                        tile.geometry.physical_col(c)] = g_on;

    const int n = 2 * rows * cols - rows - cols;
    CsrBuilder builder(n);
    mesh.rhs.assign(n, 0.0);

    auto rv = [&](int j, int k) { return k == 0 ? mesh.row_volts[j] : 0.0; };
    // Column sense nodes C(0,k) are pinned to 0 V (virtual ground).
    for (int j = 0; j < rows; ++j) {
        for (int k = 0; k < cols; ++k) {
            const int rn = mesh.row_node(j, k);
            const int cn = mesh.col_node(j, k);
            stamp(builder, mesh.rhs, rn, rv(j, k), cn, 0.0,
                  mesh.device_conductance[static_cast<std::size_t>(j) * cols + k]);
            if (k + 1 < cols)
                stamp(builder, mesh.rhs, rn, rv(j, k), mesh.row_node(j, k + 1), 0.0, g_wire);
            if (j + 1 < rows)
                stamp(builder, mesh.rhs, cn, 0.0, mesh.col_node(j + 1, k), 0.0, g_wire);
        }
    }
    mesh.matrix = builder.build();
    return mesh;
}

std::vector<double> solve_mesh(const MeshSystem& mesh, double tol, SolveStats* stats) {
    CgResult cg = pcg_solve(mesh.matrix, mesh.rhs, tol);
    if (stats) *stats = {cg.iterations, cg.residual};
    return cg.x;
}

std::vector<double> solve_mesh_direct(const MeshSystem& mesh, SolveStats* stats) {
    std::vector<double> x = ldlt_solve(mesh.matrix, mesh.rhs);
    if (stats) {
        std::vector<double> ax(mesh.matrix.n);
        mesh.matrix.multiply(x.data(), ax.data());
        double rr = 0.0, bb = 0.0;
        for (int i = 0; i < mesh.matrix.n; ++i) {
            const double d = mesh.rhs[i] - ax[i];
            rr += d * d;
            bb += mesh.rhs[i] * mesh.rhs[i];
        }
        *stats = {0, bb > 0.0 ? std::sqrt(rr / bb) : 0.0};
    }
    return x;
}

namespace {

MeshSolution solve_crossbar_on(const MeshSystem& mesh, const ResistanceParams& params,
                               double tol, bool direct) {
    MeshSolution sol;
    std::vector<double> x =
        direct ? solve_mesh_direct(mesh, &sol.stats) : solve_mesh(mesh, tol, &sol.stats);

    const int rows = mesh.rows, cols = mesh.cols;
    sol.row_voltage.resize(static_cast<std::size_t>(rows) * cols);
    sol.col_voltage.resize(static_cast<std::size_t>(rows) * cols);
    for (int j = 0; j < rows; ++j) {
        for (int k = 0; k < cols; ++k) {
            const int rn = mesh.row_node(j, k);
            const int cn = mesh.col_node(j, k);
            sol.row_voltage[static_cast<std::size_t>(j) * cols + k] =
                rn < 0 ? mesh.row_volts[j] : x[rn];
            sol.col_voltage[static_cast<std::size_t>(j) * cols + k] = cn < 0 ? 0.0 : x[cn];
        }
    }

    const double g_wire = 1.0 / params.wire_r;
    sol.column_current.assign(cols, 0.0);
    for (int k = 0; k < cols; ++k) {
        // Everything entering the virtual ground C(0,k): the device at row 0
        // plus the column segment from C(1,k).
        double i = mesh.device_conductance[k] * sol.row_voltage[k];
        if (rows > 1) i += g_wire * sol.col_voltage[static_cast<std::size_t>(1) * cols + k];
        sol.column_current[k] = i;
        sol.ground_current += i;
    }
    for (int j = 0; j < rows; ++j) {
        // Everything leaving the drive pin R(j,0): the device at column 0
        // plus the row segment toward R(j,1).
        const double v0 = mesh.row_volts[j];
        double i = mesh.device_conductance[static_cast<std::size_t>(j) * cols] *
                   (v0 - sol.col_voltage[static_cast<std::size_t>(j) * cols]);
        if (cols > 1)
            i += g_wire * (v0 - sol.row_voltage[static_cast<std::size_t>(j) * cols + 1]);
        sol.drive_current += i;
    }
    return sol;
}

NfMeasurement measured_nf_on(const BitTile& tile, const ResistanceParams& params, double tol,
                             bool direct) {
    tile.validate();
    params.validate();
    const int rows = tile.rows(), cols = tile.cols();
    const double g_on = 1.0 / params.r_on;
    const double g_off = 1.0 / params.r_off;

    NfMeasurement m;
    m.ideal_current.assign(cols, 0.0);
    for (int j = 0; j < rows; ++j)
        for (int c = 0; c < cols; ++c)
            m.ideal_current[c] += params.v_in * (tile.active(j, c) ? g_on : g_off);

    if (params.wire_r == 0.0) {
        m.actual_current = m.ideal_current;
    } else {
        std::vector<double> volts(rows, params.v_in);
        const MeshSystem mesh = build_mesh(tile, params, volts);
        MeshSolution sol = solve_crossbar_on(mesh, params, tol, direct);
        m.stats = sol.stats;
        m.actual_current.resize(cols);
        for (int c = 0; c < cols; ++c)
            m.actual_current[c] = sol.column_current[tile.geometry.physical_col(c)];
    }

    m.nf_per_column.assign(cols, 0.0);
    double sum_dev = 0.0, sum_ideal = 0.0;
    for (int c = 0; c < cols; ++c) {
        if (m.ideal_current[c] <= 0.0) {
            m.excluded_columns.push_back(c);
            continue;
        }
        const double dev = std::fabs(m.ideal_current[c] - m.actual_current[c]);
        m.nf_per_column[c] = dev / m.ideal_current[c];
        sum_dev += dev;
        sum_ideal += m.ideal_current[c];
    }
    m.aggregate = sum_ideal > 0.0 ? sum_dev / sum_ideal : 0.0;
    return m;
}

}  // namespace

MeshSolution solve_crossbar(const BitTile& tile, const ResistanceParams& params,
                            std::span<const double> row_volts, double tol) {
    const MeshSystem mesh = build_mesh(tile, params, row_volts);
    return solve_crossbar_on(mesh, params, tol, false);
}

NfMeasurement measured_nf(const BitTile& tile, const ResistanceParams& params, double tol) {
    return measured_nf_on(tile, params, tol, false);
}

SymmetryResult symmetry_check(const BitTile& tile, const ResistanceParams& params) {
    if (tile.rows() != tile.cols())
        throw std::invalid_argument("symmetry check requires a square tile");
    // The figure differences probed here sit near the iterative solver's
    // attainable floor, so small meshes go through the direct route.
    const int n_free = 2 * tile.rows() * tile.cols() - tile.rows() - tile.cols();
    const bool direct = n_free <= kDirectSolveLimit;
    const double tol = 1e-13;
    SymmetryResult r;
    r.nf_original = measured_nf_on(tile, params, tol, direct).aggregate;
    r.nf_transposed =
        measured_nf_on(antidiagonal_transpose(tile), params, tol, direct).aggregate;
    const double denom = std::max(r.nf_original, r.nf_transposed);
    r.gap = denom > 0.0 ? std::fabs(r.nf_original - r.nf_transposed) / denom : 0.0;
    return r;
}

void write_netlist(std::ostream& out, const BitTile& tile, const ResistanceParams& params) {
    tile.validate();
    params.validate();
    if (params.wire_r <= 0.0)
        throw std::invalid_argument("netlist export needs wire_r > 0");
    const int rows = tile.rows(), cols = tile.cols();

    std::vector<double> device(static_cast<std::size_t>(rows) * cols, params.r_off);
    for (int j = 0; j < rows; ++j)
        for (int c = 0; c < cols; ++c)
            if (tile.active(j, c))
                device[static_cast<std::size_t>(j) * cols + tile.geometry.physical_col(c)] =
                    params.r_on;

    out << "* crossbar tile " << rows << "x" << cols << " wire_r=" << params.wire_r
        << " r_on=" << params.r_on << " r_off=" << params.r_off << "\n";
    for (int j = 0; j < rows; ++j)
        out << "Vr" << j << " nr_" << j << "_0 0 DC " << params.v_in << "\n";
    for (int k = 0; k < cols; ++k) out << "Vc" << k << " nc_0_" << k << " 0 DC 0\n";

    int id = 1;
    for (int j = 0; j < rows; ++j) {
        for (int k = 0; k < cols; ++k) {
            out << "R" << id++ << " nr_" << j << "_" << k << " nc_" << j << "_" << k << " "
                << device[static_cast<std::size_t>(j) * cols + k] << "\n";
            if (k + 1 < cols)
                out << "R" << id++ << " nr_" << j << "_" << k << " nr_" << j << "_" << k + 1
                    << " " << params.wire_r << "\n";
            if (j + 1 < rows)
                out << "R" << id++ << " nc_" << j << "_" << k << " nc_" << j + 1 << "_" << k
                    << " " << params.wire_r << "\n";
        }
    }
    out << ".op\n.end\n";
}

}  // namespace mdm
