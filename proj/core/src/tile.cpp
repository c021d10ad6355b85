#include "mdm/tile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mdm {

Dataflow dataflow_from_string(const std::string& s) {
    if (s == "conventional") return Dataflow::Conventional;
    if (s == "reversed") return Dataflow::Reversed;
    throw std::invalid_argument("unknown dataflow '" + s + "'");
}

BitTile::BitTile(CrossbarGeometry g, std::vector<int> sigs, int group)
    : geometry(g),
      delta(static_cast<std::size_t>(g.rows) * g.cols, 0),
      significances(std::move(sigs)),
      weights_per_row(group) {
    validate();
}

long long BitTile::active_count() const {
    return std::accumulate(delta.begin(), delta.end(), 0LL,
                           [](long long a, std::uint8_t b) { return a + (b != 0); });
}

long long BitTile::distance_sum() const {
    long long total = 0;
    for (int j = 0; j < geometry.rows; ++j)
        for (int c = 0; c < geometry.cols; ++c)
            if (active(j, c)) total += manhattan_distance(geometry, j, c);
    return total;
}

void BitTile::validate() const {
    geometry.validate();
    const std::size_t cells = static_cast<std::size_t>(geometry.rows) * geometry.cols;
    if (delta.size() != cells)
        throw std::invalid_argument("tile occupancy size " + std::to_string(delta.size()) +
                                    " does not match geometry (" + std::to_string(cells) + " cells)");
    for (std::uint8_t v : delta)
        if (v > 1) throw std::invalid_argument("tile occupancy entries must be 0 or 1");
    if (static_cast<int>(significances.size()) != geometry.cols)
        throw std::invalid_argument("significance list must have one entry per column");
    if (weights_per_row < 1 || geometry.cols % weights_per_row != 0)
        throw std::invalid_argument("weights_per_row must divide the column count");
    // Significance-major pattern: blocks of weights_per_row equal exponents,
    // strictly increasing across blocks (most significant first).
    const int g = weights_per_row;
    for (int c = 0; c < geometry.cols; ++c) {
        if (significances[c] != significances[(c / g) * g])
            throw std::invalid_argument("significance must be constant within a column block");
        if (c / g > 0 && significances[c] <= significances[(c / g - 1) * g])
            throw std::invalid_argument("block significances must be strictly increasing");
    }
}

std::vector<int> expand_significances(const std::vector<int>& block_exponents, int group) {
    if (group < 1) throw std::invalid_argument("group must be >= 1");
    std::vector<int> out;
    out.reserve(block_exponents.size() * group);
    for (int e : block_exponents)
        for (int w = 0; w < group; ++w) out.push_back(e);
    return out;
}

std::vector<int> contiguous_significances(int first, int count) {
    std::vector<int> out(count);
    std::iota(out.begin(), out.end(), first);
    return out;
}

BitTile antidiagonal_transpose(const BitTile& t) {
    t.validate();
    const int n = t.rows();
    if (t.cols() != n)
        throw std::invalid_argument("anti-diagonal transpose requires a square tile");
    BitTile out = t;
    std::fill(out.delta.begin(), out.delta.end(), 0);
    for (int j = 0; j < n; ++j) {
        for (int c = 0; c < n; ++c) {
            if (!t.active(j, c)) continue;
            // Swap the two rail distances in physical coordinates, then store
            // at the logical column that lands on the swapped position.
            const int kp = t.geometry.physical_col(c);
            const int c2 = t.geometry.dataflow == Dataflow::Conventional ? j : n - 1 - j;
            out.set_active(kp, c2, true);
        }
    }
    return out;
}

void WeightMatrix::validate() const {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("weight matrix dimensions must be non-negative");
    if (values.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("weight matrix storage does not match its dimensions");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("weight matrix entries must be finite");
}

MdmPlan MdmPlan::identity(int rows) {
    MdmPlan p;
    p.row_perm.resize(rows);
    std::iota(p.row_perm.begin(), p.row_perm.end(), 0);
    return p;
}

void MdmPlan::validate(int rows) const {
    if (static_cast<int>(row_perm.size()) != rows)
        throw std::invalid_argument("plan permutation length does not match the tile");
    std::vector<char> seen(rows, 0);
    for (int p : row_perm) {
        if (p < 0 || p >= rows || seen[p])
            throw std::invalid_argument("plan row_perm is not a permutation of 0..rows-1");
        seen[p] = 1;
    }
}

}  // namespace mdm
