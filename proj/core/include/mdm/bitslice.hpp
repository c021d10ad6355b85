#ifndef MDM_BITSLICE_HPP
#define MDM_BITSLICE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mdm/tile.hpp"

namespace mdm {

// Source distribution for synthetic weights. Exponential and HalfNormal have
// analytic densities; Empirical wraps a fixed sample set.
struct WeightDistribution {
    enum class Kind { Exponential, HalfNormal, Empirical };

    Kind kind = Kind::HalfNormal;
    double param = 1.0;             // rate lambda, or scale sigma
    std::vector<double> samples;    // Empirical only

    static WeightDistribution exponential(double lambda);
    static WeightDistribution half_normal(double sigma);
    static WeightDistribution empirical(std::vector<double> samples);

    // Density at zero (from the right). Throws for Empirical.
    double density_at_zero() const;

    // Deterministic sample for counter slot `index` of stream `seed`.
    // Empirical draws from `samples` with replacement.
    double sample(std::uint64_t seed, std::uint64_t index) const;

    std::string name() const;
};

// Greedy binary expansion of |w| over the given significance exponents
// (bit c has value 2^-significances[c]), sign dropped; truncation toward
// zero, most significant first. Weights are normalized per matrix before
// slicing: if max|w| already fits below 2^(1-e_0) the scale is 1 and bits
// are exact truncations of the raw values, otherwise the matrix is scaled so
// the largest magnitude lands on the top bit. Returns the tile (columns laid
// out significance-major, one weight column group per matrix column) and the
// scale such that dequantize(tile, scale) approximates the input.
struct QuantizeResult {
    BitTile tile;
    double scale = 1.0;
};

QuantizeResult quantize(const WeightMatrix& weights, const std::vector<int>& significances,
                        Dataflow dataflow = Dataflow::Conventional);

// Inverse of quantize up to truncation error: w_hat = scale * sum_c delta * 2^-e_c.
WeightMatrix dequantize(const BitTile& tile, double scale);

// Fraction of active cells per logical column.
std::vector<double> column_density(const BitTile& tile);

// Empirical column-sparsity check against the analytic near-half-density
// bound. For a nonincreasing density f with f(0) finite, the bit of cell
// size L = 2^-k extracted from raw samples satisfies
// |p_k - 1/2| <= f(0) * 2^-(k+2); the check allows 3 binomial standard
// deviations of slack on top of the bound.
struct SparsityColumn {
    int k = 0;
    double p_hat = 0.0;
    double bound = 0.0;
    bool ok = false;
};

struct SparsityReport {
    std::string distribution;
    std::uint64_t n = 0;
    double f0 = 0.0;
    std::vector<SparsityColumn> columns;

    bool all_ok() const;
};

// Samples n raw weights and measures bits k = 0..bit_depth-1, where bit k
// partitions the axis into cells of size 2^-k and reports the upper-half-cell
// frequency. Requires an analytic distribution and n >= 10^4.
SparsityReport verify_sparsity_bound(const WeightDistribution& dist, std::uint64_t n,
                                     int bit_depth, std::uint64_t seed);

}  // namespace mdm

#endif
