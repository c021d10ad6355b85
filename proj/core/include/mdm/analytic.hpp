#ifndef MDM_ANALYTIC_HPP
#define MDM_ANALYTIC_HPP

#include <vector>

#include "mdm/params.hpp"
#include "mdm/tile.hpp"

namespace mdm {

// First-order wire-drop estimate: each active cell contributes r/R_on times
// its Manhattan distance from the rails, so the tile-level figure is
// (r/R_on) * sum over active cells of (j + k_phys).
struct NfPrediction {
    double nf_sum = 0.0;         // total over all columns
    double nf_normalized = 0.0;  // nf_sum / active cell count (0 for empty tile)
};

NfPrediction analytic_nf(const BitTile& tile, const ResistanceParams& params);

// Per-row aggregates of the prediction under the tile's current dataflow:
// n = active count, c = sum of physical column distances of active cells.
// A row placed at physical position p contributes p*n + c to the distance sum.
struct RowScore {
    int row = 0;           // stored row index
    long long n = 0;       // active cells in the row
    long long c = 0;       // column-distance term
};

std::vector<RowScore> row_scores(const BitTile& tile);

// Row remapping that minimizes the predicted figure: pick the dataflow with
// the smaller column-distance term (ties broken toward Reversed, which favors
// least-significant-first layouts), then assign physical positions by sorting
// rows on (n descending, c ascending, stored index) so dense rows sit nearest
// the rails. The sort realizes the rearrangement-inequality minimum of
// sum_r position(r)*n_r, so the result is exactly optimal over all row
// permutations and both dataflows.
struct MdmResult {
    MdmPlan plan;
    BitTile tile;   // input tile with the plan applied
};

MdmResult mdm_map(const BitTile& tile);

// Physically permutes rows (stored row r moves to position plan.row_perm[r])
// and stamps the plan's dataflow onto the result.
BitTile apply_plan(const MdmPlan& plan, const BitTile& tile);

// Undoes apply_plan: returns the tile whose apply_plan image is `tile`, in
// conventional orientation (the canonical orientation of unmapped tiles).
BitTile invert_plan(const MdmPlan& plan, const BitTile& tile);

// Exhaustive minimum of analytic_nf over all row permutations of the tile in
// both dataflows. Intended for small tiles (cost rows! * 2); used to check
// mdm_map. Returns the best figure and one optimal plan.
struct BruteForceResult {
    double nf_sum = 0.0;
    MdmPlan plan;
};

BruteForceResult brute_force_optimal_nf(const BitTile& tile,
                                        const ResistanceParams& params = {});

}  // namespace mdm

#endif
