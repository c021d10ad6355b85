#include "mdm/analytic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mdm {

NfPrediction analytic_nf(const BitTile& tile, const ResistanceParams& params) {
    tile.validate();
    params.validate();
    NfPrediction p;
    const long long dist = tile.distance_sum();
    const long long count = tile.active_count();
    p.nf_sum = params.r_over_ron() * static_cast<double>(dist);
    p.nf_normalized = count > 0 ? p.nf_sum / static_cast<double>(count) : 0.0;
    return p;
}

std::vector<RowScore> row_scores(const BitTile& tile) {
    tile.validate();
    std::vector<RowScore> scores(tile.rows());
    for (int j = 0; j < tile.rows(); ++j) {
        RowScore& s = scores[j];
        s.row = j;
        for (int c = 0; c < tile.cols(); ++c) {
            if (!tile.active(j, c)) continue;
            s.n += 1;
            s.c += tile.geometry.physical_col(c);
        }
    }
    return scores;
}

BitTile apply_plan(const MdmPlan& plan, const BitTile& tile) {
    tile.validate();
    plan.validate(tile.rows());
    BitTile out = tile;
    out.geometry.dataflow = plan.dataflow;
    for (int r = 0; r < tile.rows(); ++r) {
        const int p = plan.row_perm[r];
        std::copy_n(tile.delta.begin() + static_cast<std::size_t>(r) * tile.cols(), tile.cols(),
                    out.delta.begin() + static_cast<std::size_t>(p) * tile.cols());
    }
    return out;
}

BitTile invert_plan(const MdmPlan& plan, const BitTile& tile) {
    tile.validate();
    plan.validate(tile.rows());
    BitTile out = tile;
    out.geometry.dataflow = Dataflow::Conventional;
    for (int r = 0; r < tile.rows(); ++r) {
        const int p = plan.row_perm[r];
        std::copy_n(tile.delta.begin() + static_cast<std::size_t>(p) * tile.cols(), tile.cols(),
                    out.delta.begin() + static_cast<std::size_t>(r) * tile.cols());
    }
    return out;
}

MdmResult mdm_map(const BitTile& tile) {
    tile.validate();
    const int rows = tile.rows();
    const int cols = tile.cols();

    // Column-distance term under each candidate orientation; the row
    // permutation cannot change it, so the better orientation is decided
    // first. Ties go to Reversed: distributions quantized from small weights
    // are densest in the low-order columns, which reversal moves rail-side.
    long long c_conv = 0;
    long long active = 0;
    for (int j = 0; j < rows; ++j) {
        for (int c = 0; c < cols; ++c) {
            if (!tile.active(j, c)) continue;
            c_conv += c;
            active += 1;
        }
    }
    const long long c_rev = active * (cols - 1) - c_conv;

    MdmResult result;
    result.plan.dataflow = c_rev <= c_conv ? Dataflow::Reversed : Dataflow::Conventional;

    BitTile oriented = tile;
    oriented.geometry.dataflow = result.plan.dataflow;
    std::vector<RowScore> scores = row_scores(oriented);
    std::stable_sort(scores.begin(), scores.end(), [](const RowScore& a, const RowScore& b) {
        if (a.n != b.n) return a.n > b.n;
        if (a.c != b.c) return a.c < b.c;
        return a.row < b.row;
    });

    result.plan.row_perm.resize(rows);
    for (int pos = 0; pos < rows; ++pos) result.plan.row_perm[scores[pos].row] = pos;
    result.tile = apply_plan(result.plan, tile);
    return result;
}

BruteForceResult brute_force_optimal_nf(const BitTile& tile, const ResistanceParams& params) {
    tile.validate();
    params.validate();
    const int rows = tile.rows();
    if (rows > 10)
        throw std::invalid_argument("exhaustive search is limited to tiles with at most 10 rows");

    // Enumerate with the integer decomposition sum = Σ_r position(r)*n_r + Σc:
    // exact in 64-bit, and the final scaling matches analytic_nf bit for bit.
    BruteForceResult best;
    long long best_sum = 0;
    bool first = true;
    std::vector<int> perm(rows);
    for (Dataflow flow : {Dataflow::Conventional, Dataflow::Reversed}) {
        BitTile oriented = tile;
        oriented.geometry.dataflow = flow;
        const std::vector<RowScore> scores = row_scores(oriented);
        long long c_term = 0;
        for (const auto& s : scores) c_term += s.c;

        std::iota(perm.begin(), perm.end(), 0);
        do {
            long long sum = c_term;
            for (int r = 0; r < rows; ++r) sum += static_cast<long long>(perm[r]) * scores[r].n;
            if (first || sum < best_sum) {
                best_sum = sum;
                best.plan = MdmPlan{perm, flow};
                first = false;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    best.nf_sum = params.r_over_ron() * static_cast<double>(best_sum);
    return best;
}

}  // namespace mdm
