#ifndef MDM_CIRCUIT_HPP
#define MDM_CIRCUIT_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "mdm/params.hpp"
#include "mdm/sparse.hpp"
#include "mdm/tile.hpp"

namespace mdm {

// Nodal-analysis model of one crossbar tile. Every crosspoint (j, k) in
// physical coordinates has a row-wire node R(j,k) and a column-wire node
// C(j,k) joined by the device conductance; adjacent nodes along a wire are
// joined by the segment conductance 1/r. Drive nodes R(j,0) are pinned to the
// row voltage and sense nodes C(0,k) to 0 V (virtual ground); both are
// eliminated into the right-hand side, leaving 2JK - J - K unknowns.
struct MeshSystem {
    int rows = 0;
    int cols = 0;
    CsrMatrix matrix;            // SPD conductance matrix over free nodes
    std::vector<double> rhs;
    std::vector<double> row_volts;          // per-row drive voltage
    std::vector<double> device_conductance; // rows*cols, physical layout

    int n_free() const { return matrix.n; }

    // Free-node indices; -1 marks a pinned node.
    int row_node(int j, int k) const { return k == 0 ? -1 : j * (cols - 1) + (k - 1); }
    int col_node(int j, int k) const {
        return j == 0 ? -1 : rows * (cols - 1) + (j - 1) * cols + k;
    }
};

// Assembles the mesh for the tile under `params` with the given per-row drive
// voltages (size = tile rows). Requires wire_r > 0: a zero-resistance wire
// collapses the mesh and is served by the closed-form ideal path instead.
MeshSystem build_mesh(const BitTile& tile, const ResistanceParams& params,
                      std::span<const double> row_volts);

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

// Solves the mesh to the given relative residual. Throws SolverError on
// non-convergence.
std::vector<double> solve_mesh(const MeshSystem& mesh, double tol = 1e-10,
                               SolveStats* stats = nullptr);

// Direct dense factorization route for small meshes; accurate to rounding, so
// it serves where iterative slack would mask the quantity under study. Cubic
// in n_free: callers should gate on size (kDirectSolveLimit free nodes is the
// intended ceiling). Reported stats carry 0 iterations and the recomputed
// relative residual.
inline constexpr int kDirectSolveLimit = 2500;
std::vector<double> solve_mesh_direct(const MeshSystem& mesh, SolveStats* stats = nullptr);

// Full voltage/current picture of one solved tile, physical layout.
struct MeshSolution {
    std::vector<double> row_voltage;      // rows*cols
    std::vector<double> col_voltage;      // rows*cols
    std::vector<double> column_current;   // per physical column, at the ground rail
    double drive_current = 0.0;           // total current leaving the row drivers
    double ground_current = 0.0;          // total current entering the virtual grounds
    SolveStats stats;
};

MeshSolution solve_crossbar(const BitTile& tile, const ResistanceParams& params,
                            std::span<const double> row_volts, double tol = 1e-10);

// Output-referred wire-drop figure per column: |i_ideal - i_actual| / i_ideal,
// where the ideal current is the r = 0 value sum_j V_j * g(j,k). Columns whose
// ideal current is zero (nothing conducts or zero drive) are excluded from the
// aggregate and listed in excluded_columns. The aggregate is
// sum_k |di_k| / sum_k i0_k over included columns. Column indices are logical.
struct NfMeasurement {
    std::vector<double> ideal_current;    // per logical column
    std::vector<double> actual_current;
    std::vector<double> nf_per_column;
    std::vector<int> excluded_columns;
    double aggregate = 0.0;
    SolveStats stats;
};

NfMeasurement measured_nf(const BitTile& tile, const ResistanceParams& params,
                          double tol = 1e-10);

// Checks that the aggregate figure is invariant under anti-diagonal
// transposition (exchanging the roles of rows and columns maps the mesh onto
// itself, so the invariance is exact up to solver noise). Square tiles only.
// Meshes up to kDirectSolveLimit free nodes use the direct dense route so the
// reported gap reflects the property, not solver slack; larger ones fall back
// to the iterative solver at tightened tolerance.
struct SymmetryResult {
    double nf_original = 0.0;
    double nf_transposed = 0.0;
    double gap = 0.0;   // |nf_original - nf_transposed|
};

SymmetryResult symmetry_check(const BitTile& tile, const ResistanceParams& params);

// SPICE-style netlist of the tile: one resistor per line
// "R<id> <node+> <node-> <ohms>", voltage sources for the row drives and the
// column virtual grounds, terminated with .op/.end.
void write_netlist(std::ostream& out, const BitTile& tile, const ResistanceParams& params);

}  // namespace mdm

#endif
