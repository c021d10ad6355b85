#ifndef MDM_EXPERIMENTS_HPP
#define MDM_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mdm/analytic.hpp"
#include "mdm/bitslice.hpp"
#include "mdm/circuit.hpp"

namespace mdm {

// Bernoulli tile: every cell independently active with probability
// 1 - sparsity. Significances 0..K-1, one weight per row.
BitTile gen_random_tile(int rows, int cols, double sparsity, std::uint64_t seed);

// Samples rows x (cols / bits_per_weight) weights from `dist` and bit-slices
// them into one significance-major tile with exponents 1..bits_per_weight.
// Matches the column-sparsity gradient of trained-network weights: high-order
// columns nearly empty, low-order columns near half density.
BitTile gen_dnn_like_tile(const WeightDistribution& dist, int rows, int cols,
                          std::uint64_t seed, int bits_per_weight = 8);

// Convenience sampler used by the experiments: rows x cols draws from `dist`.
WeightMatrix sample_weight_matrix(const WeightDistribution& dist, int rows, int cols,
                                  std::uint64_t seed);

// Ordinary least squares of measured aggregate figures against the analytic
// prediction over a batch of random tiles, plus per-tile relative residuals
// (measured - fitted) / measured in percent.
struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_mean_pct = 0.0;
    double residual_std_pct = 0.0;
    int n_tiles = 0;
};

// OLS core over explicit (predicted, measured) pairs; needs at least two
// points. All-equal predictors are degenerate unless the measurements are
// also all equal (then the fit is the constant). Throws on degeneracy.
FitReport linear_fit(const std::vector<std::array<double, 2>>& points);

// Generates n_tiles Bernoulli tiles, predicts and measures each, and fits.
// Optionally returns the raw (predicted, measured) pairs through `scatter`.
FitReport hypothesis_fit(int n_tiles, int rows, int cols, double sparsity,
                         const ResistanceParams& params, std::uint64_t seed,
                         std::vector<std::array<double, 2>>* scatter = nullptr,
                         int threads = 1);

// Mean measured figure over a tile batch for one mapping configuration.
struct BenchmarkRow {
    std::string config;
    double mean_nf = 0.0;
    double reduction_pct = 0.0;   // versus the first (baseline) row
};

// Evaluates conventional/identity, conventional+remap, reversed+remap over
// the given tiles and reports mean figures and reductions vs the baseline.
std::vector<BenchmarkRow> nf_benchmark(const std::vector<BitTile>& tiles,
                                       const ResistanceParams& params, int threads = 1);

// Per-cell degradation model: an active cell at Manhattan distance d delivers
// (1 - eta*d) of its ideal current (Distance weighting), or uniformly
// (1 - eta) regardless of position (Uniform weighting, for comparison).
struct NoiseModel {
    enum class Weighting { Distance, Uniform };
    double eta = 0.0;
    Weighting weighting = Weighting::Distance;
};

// Least-squares eta from per-column current deficits: predictor a_k is the
// deficit a unit eta would cause, response b_k the measured deficit, and
// eta = sum(a*b) / sum(a*a). Throws if every predictor entry is zero.
double calibrate_eta_from_deficits(const std::vector<std::array<double, 2>>& deficits);

// Runs the mesh on each tile and calibrates eta from the pooled per-column
// deficits. r = 0 gives zero deficits and therefore eta = 0.
double calibrate_eta(const std::vector<BitTile>& tiles, const ResistanceParams& params,
                     int threads = 1);

// Applies the degradation model to a mapped tile and reassembles effective
// weights: each bit contributes scale * 2^-e * (1 - eta*d) with d evaluated
// at the cell's mapped position. Requires eta * d_max < 1 so no cell flips
// sign. Output is rows x weights_per_row.
WeightMatrix inject_noise(const BitTile& tile, const MdmPlan& plan, const NoiseModel& model,
                          double scale);

// Monte-Carlo proxy for model accuracy: quantizes `weights`, degrades the
// tile once under the identity plan and once under its mdm_map plan, and
// compares y = W^T x against the clean quantized output over random positive
// inputs. Reports mean relative output error per plan and how many trials the
// remapped tile won or tied. Trials with zero clean output are discarded.
struct AccuracyResult {
    double baseline_err = 0.0;
    double mdm_err = 0.0;
    int trials = 0;
    int improved_or_tied = 0;
    int discarded = 0;
};

AccuracyResult accuracy_proxy(const WeightMatrix& weights, const NoiseModel& model,
                              int trials, std::uint64_t seed, int bits_per_weight = 8);

}  // namespace mdm

#endif
