#include "mdm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdm/parallel.hpp"
#include "mdm/rng.hpp"

namespace mdm {

BitTile gen_random_tile(int rows, int cols, double sparsity, std::uint64_t seed) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("sparsity must lie in [0, 1]");
    BitTile tile({rows, cols, Dataflow::Conventional}, contiguous_significances(0, cols));
    const double p_active = 1.0 - sparsity;
    for (int j = 0; j < rows; ++j)
        for (int c = 0; c < cols; ++c)
            if (rng::to_unit(rng::at(seed, static_cast<std::uint64_t>(j) * cols + c)) < p_active)
                tile.set_active(j, c, true);
    return tile;
}

WeightMatrix sample_weight_matrix(const WeightDistribution& dist, int rows, int cols,
                                  std::uint64_t seed) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("weight matrix must be non-empty");
    WeightMatrix w(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            w.at(r, c) = dist.sample(seed, static_cast<std::uint64_t>(r) * cols + c);
    return w;
}

BitTile gen_dnn_like_tile(const WeightDistribution& dist, int rows, int cols,
                          std::uint64_t seed, int bits_per_weight) {
    if (bits_per_weight < 1 || cols % bits_per_weight != 0)
        throw std::invalid_argument("bits_per_weight must divide the column count");
    const int group = cols / bits_per_weight;
    WeightMatrix w = sample_weight_matrix(dist, rows, group, seed);
    return quantize(w, contiguous_significances(1, bits_per_weight)).tile;
}

FitReport linear_fit(const std::vector<std::array<double, 2>>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("fit needs at least two points");

    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p[0];
        my += p[1];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        sxx += (p[0] - mx) * (p[0] - mx);
        sxy += (p[0] - mx) * (p[1] - my);
        syy += (p[1] - my) * (p[1] - my);
    }

    FitReport fit;
    fit.n_tiles = n;
    if (sxx == 0.0) {
        // All predictors equal: only a constant can be identified. That is
        // fine when the measurements agree too, degenerate otherwise.
        if (syy != 0.0)
            throw std::invalid_argument("degenerate fit: predictor has no variance");
        fit.slope = 0.0;
        fit.intercept = my;
    } else {
        fit.slope = sxy / sxx;
        fit.intercept = my - fit.slope * mx;
    }

    double sum = 0.0;
    std::vector<double> resid(n);
    for (int i = 0; i < n; ++i) {
        const double fitted = fit.slope * points[i][0] + fit.intercept;
        resid[i] = points[i][1] != 0.0 ? (points[i][1] - fitted) / points[i][1] * 100.0 : 0.0;
        sum += resid[i];
    }
    fit.residual_mean_pct = sum / n;
    double var = 0.0;
    for (double r : resid) var += (r - fit.residual_mean_pct) * (r - fit.residual_mean_pct);
    fit.residual_std_pct = std::sqrt(var / (n - 1));
    return fit;
}

FitReport hypothesis_fit(int n_tiles, int rows, int cols, double sparsity,
                         const ResistanceParams& params, std::uint64_t seed,
                         std::vector<std::array<double, 2>>* scatter, int threads) {
    if (n_tiles < 2) throw std::invalid_argument("fit needs at least two tiles");
    params.validate();
    std::vector<std::array<double, 2>> points(n_tiles);
    parallel_for(n_tiles, threads, [&](int t) {
        const BitTile tile = gen_random_tile(rows, cols, sparsity, rng::derive_stream(seed, t));
        points[t] = {analytic_nf(tile, params).nf_sum, measured_nf(tile, params).aggregate};
    });
    if (scatter) *scatter = points;
    return linear_fit(points);
}

namespace {

// Row order for a fixed orientation: densest rows at the rails, ties by
// smaller column-distance term, then stored index.
MdmPlan sorted_plan(const BitTile& tile, Dataflow flow) {
    BitTile oriented = tile;
    oriented.geometry.dataflow = flow;
    std::vector<RowScore> scores = row_scores(oriented);
    std::stable_sort(scores.begin(), scores.end(), [](const RowScore& a, const RowScore& b) {
        if (a.n != b.n) return a.n > b.n;
        if (a.c != b.c) return a.c < b.c;
        return a.row < b.row;
    });
    MdmPlan plan;
    plan.dataflow = flow;
    plan.row_perm.resize(tile.rows());
    for (int pos = 0; pos < static_cast<int>(scores.size()); ++pos)
        plan.row_perm[scores[pos].row] = pos;
    return plan;
}

}  // namespace

std::vector<BenchmarkRow> nf_benchmark(const std::vector<BitTile>& tiles,
                                       const ResistanceParams& params, int threads) {
    if (tiles.empty()) throw std::invalid_argument("benchmark needs at least one tile");
    params.validate();
    const int n = static_cast<int>(tiles.size());
    std::vector<std::array<double, 3>> nf(n);
    parallel_for(n, threads, [&](int t) {
        const BitTile& tile = tiles[t];
        const MdmPlan conv = sorted_plan(tile, Dataflow::Conventional);
        const MdmPlan rev = sorted_plan(tile, Dataflow::Reversed);
        nf[t] = {measured_nf(tile, params).aggregate,
                 measured_nf(apply_plan(conv, tile), params).aggregate,
                 measured_nf(apply_plan(rev, tile), params).aggregate};
    });

    std::vector<BenchmarkRow> rows(3);
    rows[0].config = "conventional_identity";
    rows[1].config = "conventional_mdm";
    rows[2].config = "reversed_mdm";
    for (int t = 0; t < n; ++t)
        for (int c = 0; c < 3; ++c) rows[c].mean_nf += nf[t][c];
    for (auto& row : rows) row.mean_nf /= n;
    const double base = rows[0].mean_nf;
    for (auto& row : rows)
        row.reduction_pct = base > 0.0 ? (base - row.mean_nf) / base * 100.0 : 0.0;
    return rows;
}

double calibrate_eta_from_deficits(const std::vector<std::array<double, 2>>& deficits) {
    double saa = 0.0, sab = 0.0;
    for (const auto& d : deficits) {
        saa += d[0] * d[0];
        sab += d[0] * d[1];
    }
    if (saa == 0.0)
        throw std::invalid_argument("calibration predictor is identically zero");
    return sab / saa;
}

double calibrate_eta(const std::vector<BitTile>& tiles, const ResistanceParams& params,
                     int threads) {
    if (tiles.empty()) throw std::invalid_argument("calibration needs at least one tile");
    params.validate();
    const int n = static_cast<int>(tiles.size());
    std::vector<std::vector<std::array<double, 2>>> per_tile(n);
    parallel_for(n, threads, [&](int t) {
        const BitTile& tile = tiles[t];
        const NfMeasurement m = measured_nf(tile, params);
        // Unit-eta deficit: each active cell would lose eta*d of its ideal
        // current, so column k loses (v_in/r_on) * sum_active d per unit eta.
        std::vector<std::array<double, 2>> cols(tile.cols(), {0.0, 0.0});
        for (int c = 0; c < tile.cols(); ++c) {
            double a = 0.0;
            for (int j = 0; j < tile.rows(); ++j)
                if (tile.active(j, c))
                    a += params.v_in / params.r_on * manhattan_distance(tile.geometry, j, c);
            cols[c] = {a, m.ideal_current[c] - m.actual_current[c]};
        }
        per_tile[t] = std::move(cols);
    });
    std::vector<std::array<double, 2>> pooled;
    for (const auto& cols : per_tile) pooled.insert(pooled.end(), cols.begin(), cols.end());
    return calibrate_eta_from_deficits(pooled);
}

WeightMatrix inject_noise(const BitTile& tile, const MdmPlan& plan, const NoiseModel& model,
                          double scale) {
    tile.validate();
    plan.validate(tile.rows());
    if (!(model.eta >= 0.0) || !std::isfinite(model.eta))
        throw std::invalid_argument("eta must be finite and non-negative");

    CrossbarGeometry mapped = tile.geometry;
    mapped.dataflow = plan.dataflow;

    if (model.weighting == NoiseModel::Weighting::Distance) {
        long long d_max = 0;
        for (int r = 0; r < tile.rows(); ++r)
            for (int c = 0; c < tile.cols(); ++c)
                if (tile.active(r, c))
                    d_max = std::max(
                        d_max, static_cast<long long>(manhattan_distance(
                                   mapped, plan.row_perm[r], c)));
        if (model.eta * static_cast<double>(d_max) >= 1.0)
            throw std::invalid_argument("noise model out of range: eta * d_max >= 1");
    } else if (model.eta >= 1.0) {
        throw std::invalid_argument("noise model out of range: eta >= 1");
    }

    const int g = tile.weights_per_row;
    WeightMatrix w(tile.rows(), g);
    for (int r = 0; r < tile.rows(); ++r) {
        for (int c = 0; c < tile.cols(); ++c) {
            if (!tile.active(r, c)) continue;
            double factor = 1.0 - model.eta;
            if (model.weighting == NoiseModel::Weighting::Distance)
                factor = 1.0 - model.eta * manhattan_distance(mapped, plan.row_perm[r], c);
            w.at(r, c % g) += scale * std::ldexp(1.0, -tile.significances[c]) * factor;
        }
    }
    return w;
}

AccuracyResult accuracy_proxy(const WeightMatrix& weights, const NoiseModel& model,
                              int trials, std::uint64_t seed, int bits_per_weight) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    weights.validate();

    const QuantizeResult q = quantize(weights, contiguous_significances(1, bits_per_weight));
    const MdmPlan identity = MdmPlan::identity(q.tile.rows());
    const MdmPlan remap = mdm_map(q.tile).plan;

    const WeightMatrix clean = dequantize(q.tile, q.scale);
    const WeightMatrix noisy_id = inject_noise(q.tile, identity, model, q.scale);
    const WeightMatrix noisy_mdm = inject_noise(q.tile, remap, model, q.scale);

    const int rows = clean.rows, outs = clean.cols;
    AccuracyResult res;
    std::vector<double> x(rows), y0(outs), y1(outs), y2(outs);
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t stream = rng::derive_stream(seed, t);
        for (int j = 0; j < rows; ++j) x[j] = rng::to_unit(rng::at(stream, j));
        std::fill(y0.begin(), y0.end(), 0.0);
        std::fill(y1.begin(), y1.end(), 0.0);
        std::fill(y2.begin(), y2.end(), 0.0);
        for (int j = 0; j < rows; ++j) {
            for (int g = 0; g < outs; ++g) {
                y0[g] += clean.at(j, g) * x[j];
                y1[g] += noisy_id.at(j, g) * x[j];
                y2[g] += noisy_mdm.at(j, g) * x[j];
            }
        }
        double n0 = 0.0, e1 = 0.0, e2 = 0.0;
        for (int g = 0; g < outs; ++g) {
            n0 += y0[g] * y0[g];
            e1 += (y1[g] - y0[g]) * (y1[g] - y0[g]);
            e2 += (y2[g] - y0[g]) * (y2[g] - y0[g]);
        }
        if (n0 == 0.0) {
            res.discarded += 1;
            continue;
        }
        const double err_id = std::sqrt(e1 / n0);
        const double err_mdm = std::sqrt(e2 / n0);
        res.baseline_err += err_id;
        res.mdm_err += err_mdm;
        res.improved_or_tied += err_mdm <= err_id;
        res.trials += 1;
    }
    if (res.trials > 0) {
        res.baseline_err /= res.trials;
        res.mdm_err /= res.trials;
    }
    return res;
}

}  // namespace mdm
