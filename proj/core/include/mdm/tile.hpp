#ifndef MDM_TILE_HPP
#define MDM_TILE_HPP

#include <cstdint>
#include <vector>

#include "mdm/geometry.hpp"

namespace mdm {

// Bit-sliced tile: a dense 0/1 occupancy map over a crossbar, one bit per
// crosspoint, plus the binary significance of each stored column.
//
// significances[c] holds the exponent e of the column's bit value 2^-e.
// Columns are grouped significance-major: with weights_per_row = G, column
// c = s*G + w holds bit s of weight w, so all G columns of one significance
// block sit next to each other and blocks are ordered most significant first
// (strictly increasing exponent across blocks). G = 1 recovers a plain
// one-weight-per-row tile with strictly increasing significances.
struct BitTile {
    CrossbarGeometry geometry;
    std::vector<std::uint8_t> delta;   // rows*cols, row-major, logical column order
    std::vector<int> significances;    // per logical column
    int weights_per_row = 1;

    BitTile() = default;
    BitTile(CrossbarGeometry g, std::vector<int> sigs, int group = 1);

    int rows() const { return geometry.rows; }
    int cols() const { return geometry.cols; }
    int bits_per_weight() const { return geometry.cols / weights_per_row; }

    bool active(int j, int c) const { return delta[static_cast<std::size_t>(j) * geometry.cols + c] != 0; }
    void set_active(int j, int c, bool v) {
        delta[static_cast<std::size_t>(j) * geometry.cols + c] = v ? 1 : 0;
    }

    // Exponent of logical column c (bit value 2^-significance(c)).
    int significance(int c) const { return significances[c]; }
    int significance_block(int c) const { return c / weights_per_row; }
    int weight_index(int c) const { return c % weights_per_row; }

    long long active_count() const;
    // Sum of manhattan_distance over active crosspoints under the current dataflow.
    long long distance_sum() const;

    // Checks shape, delta domain and the significance-block pattern; throws on violation.
    void validate() const;

    bool operator==(const BitTile&) const = default;
};

// Expands per-block exponents into the per-column significance list for a
// significance-major layout with `group` weights per row.
std::vector<int> expand_significances(const std::vector<int>& block_exponents, int group);

// {first, first+1, ..., first+count-1}
std::vector<int> contiguous_significances(int first, int count);

// Anti-diagonal symmetry image of a square tile: swaps each active cell's two
// rail distances, (j, k) -> (k, j) in physical coordinates, so every cell
// keeps its total distance. Significances are carried along positionally; the
// dataflow flag is preserved. Throws for non-square tiles.
BitTile antidiagonal_transpose(const BitTile& t);

// Dense real-valued matrix, row-major.
struct WeightMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    WeightMatrix() = default;
    WeightMatrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }

    void validate() const;
};

// Row remapping plus a dataflow orientation. row_perm[r] is the physical
// position assigned to stored row r; dataflow is the orientation the mapped
// tile should be driven with.
struct MdmPlan {
    std::vector<int> row_perm;
    Dataflow dataflow = Dataflow::Conventional;

    static MdmPlan identity(int rows);

    // Throws unless row_perm is a permutation of 0..rows-1.
    void validate(int rows) const;

    bool operator==(const MdmPlan&) const = default;
};

}  // namespace mdm

#endif
