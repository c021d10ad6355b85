#include <atomic>
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "mdm/experiments.hpp"
#include "mdm/parallel.hpp"
#include "mdm/rng.hpp"

using namespace mdm;

namespace {
const ResistanceParams kDefaults;
}

TEST_CASE("random tiles are seed-deterministic with the requested density") {
    const BitTile a = gen_random_tile(64, 64, 0.8, 42);
    const BitTile b = gen_random_tile(64, 64, 0.8, 42);
    CHECK_EQ(a, b);
    CHECK_NE(gen_random_tile(64, 64, 0.8, 43), a);

    const double density = static_cast<double>(a.active_count()) / (64.0 * 64.0);
    CHECK_EQ(density, doctest::Approx(0.2).epsilon(0.15));

    CHECK_EQ(gen_random_tile(4, 4, 1.0, 0).active_count(), 0);
    CHECK_EQ(gen_random_tile(4, 4, 0.0, 0).active_count(), 16);
    CHECK_THROWS_AS(gen_random_tile(4, 4, 1.5, 0), std::invalid_argument);
}

TEST_CASE("network-like tiles show the significance density gradient") {
    const auto dist = WeightDistribution::half_normal(0.05);
    const BitTile t = gen_dnn_like_tile(dist, 64, 64, 5, 8);
    CHECK_EQ(t.weights_per_row, 8);
    CHECK_EQ(t.bits_per_weight(), 8);

    // per-block density, most significant block first
    const auto density = column_density(t);
    std::vector<double> block(8, 0.0);
    for (int c = 0; c < 64; ++c) block[t.significance_block(c)] += density[c] / 8.0;
    CHECK_LT(block[0], 0.02);               // top bits almost never set
    CHECK_GT(block[7], 0.35);               // low-order bits near half density
    CHECK_LT(block[2], block[5]);

    CHECK_THROWS_AS(gen_dnn_like_tile(dist, 8, 63, 0, 8), std::invalid_argument);
}

TEST_CASE("least-squares fit mechanics") {
    SUBCASE("exact linear data is recovered") {
        std::vector<std::array<double, 2>> pts;
        for (int i = 1; i <= 6; ++i)
            pts.push_back({static_cast<double>(i), 2.5 * i + 0.75});
        const FitReport f = linear_fit(pts);
        CHECK_EQ(f.slope, doctest::Approx(2.5).epsilon(1e-12));
        CHECK_EQ(f.intercept, doctest::Approx(0.75).epsilon(1e-12));
        CHECK_EQ(f.residual_mean_pct, doctest::Approx(0.0).epsilon(1e-9));
        CHECK_EQ(f.residual_std_pct, doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("duplicated point collapses to a perfect constant fit") {
        const std::vector<std::array<double, 2>> pts{{3.0, 7.0}, {3.0, 7.0}};
        const FitReport f = linear_fit(pts);
        CHECK_EQ(f.slope, 0.0);
        CHECK_EQ(f.intercept, 7.0);
        CHECK_EQ(f.residual_mean_pct, 0.0);
        CHECK_EQ(f.residual_std_pct, 0.0);
    }
    SUBCASE("flat predictor with varying response is degenerate") {
        const std::vector<std::array<double, 2>> pts{{3.0, 7.0}, {3.0, 8.0}};
        CHECK_THROWS_AS(linear_fit(pts), std::invalid_argument);
    }
    SUBCASE("fewer than two points is an error") {
        CHECK_THROWS_AS(linear_fit({{1.0, 1.0}}), std::invalid_argument);
    }
}

TEST_CASE("prediction fit on a small batch tracks the measurement tightly") {
    // The predictor is a per-tile sum while the measurement is normalized by
    // the total ideal current, so the fitted slope carries that scale; the
    // contract is a positive association with small relative residuals.
    const FitReport f = hypothesis_fit(24, 16, 16, 0.8, kDefaults, 9);
    CHECK_EQ(f.n_tiles, 24);
    CHECK_GT(f.slope, 0.0);
    CHECK_LT(std::fabs(f.residual_mean_pct), 2.0);
    CHECK_LT(f.residual_std_pct, 5.0);
}

TEST_CASE("ideal wires make every measurement zero and the fit flat") {
    ResistanceParams p = kDefaults;
    p.wire_r = 0.0;
    const FitReport f = hypothesis_fit(8, 8, 8, 0.5, p, 3);
    CHECK_EQ(f.slope, 0.0);
    CHECK_EQ(f.intercept, 0.0);
    CHECK_EQ(f.residual_mean_pct, 0.0);
    CHECK_EQ(f.residual_std_pct, 0.0);
}

TEST_CASE("fit results are byte-identical across thread counts") {
    std::vector<std::array<double, 2>> s1, s4;
    const FitReport f1 = hypothesis_fit(12, 12, 12, 0.75, kDefaults, 31, &s1, 1);
    const FitReport f4 = hypothesis_fit(12, 12, 12, 0.75, kDefaults, 31, &s4, 4);
    CHECK_EQ(f1.slope, f4.slope);
    CHECK_EQ(f1.intercept, f4.intercept);
    CHECK_EQ(f1.residual_mean_pct, f4.residual_mean_pct);
    CHECK_EQ(f1.residual_std_pct, f4.residual_std_pct);
    REQUIRE_EQ(s1.size(), s4.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK_EQ(s1[i][0], s4[i][0]);
        CHECK_EQ(s1[i][1], s4[i][1]);
    }
}

TEST_CASE("benchmark orders the three configurations as expected") {
    const auto dist = WeightDistribution::half_normal(0.05);
    std::vector<BitTile> tiles;
    for (int t = 0; t < 6; ++t)
        tiles.push_back(gen_dnn_like_tile(dist, 32, 32, rng::derive_stream(77, t), 8));
    const auto rows = nf_benchmark(tiles, kDefaults, 2);
    REQUIRE_EQ(rows.size(), 3);
    CHECK_EQ(rows[0].config, "conventional_identity");
    CHECK_EQ(rows[1].config, "conventional_mdm");
    CHECK_EQ(rows[2].config, "reversed_mdm");
    CHECK_EQ(rows[0].reduction_pct, 0.0);
    CHECK_LE(rows[1].mean_nf, rows[0].mean_nf * (1.0 + 1e-9));
    CHECK_LE(rows[2].mean_nf, rows[1].mean_nf * (1.0 + 1e-9));
    CHECK_GT(rows[2].reduction_pct, 10.0);
}

TEST_CASE("eta recovery from synthetic deficits is exact") {
    const double eta0 = 1e-3;
    std::vector<std::array<double, 2>> deficits;
    for (std::uint64_t i = 0; i < 64; ++i) {
        const double a = rng::to_unit(rng::at(13, i)) * 5e-6;
        deficits.push_back({a, eta0 * a});
    }
    const double eta = calibrate_eta_from_deficits(deficits);
    CHECK_LE(std::fabs(eta - eta0) / eta0, 1e-12);

    CHECK_THROWS_AS(calibrate_eta_from_deficits({{0.0, 1.0}, {0.0, 2.0}}),
                    std::invalid_argument);
}

TEST_CASE("circuit-backed eta calibration") {
    std::vector<BitTile> tiles;
    for (int t = 0; t < 2; ++t)
        tiles.push_back(gen_random_tile(32, 32, 0.8, rng::derive_stream(5, t)));

    SUBCASE("ideal wires give eta = 0") {
        ResistanceParams p = kDefaults;
        p.wire_r = 0.0;
        CHECK_EQ(calibrate_eta(tiles, p), 0.0);
    }
    SUBCASE("real wires give a small positive eta, stable across threads") {
        const double eta1 = calibrate_eta(tiles, kDefaults, 1);
        const double eta3 = calibrate_eta(tiles, kDefaults, 3);
        CHECK_GT(eta1, 0.0);
        CHECK_LT(eta1, 1e-2);
        CHECK_EQ(eta1, eta3);
    }
}

TEST_CASE("noise injection degrades bits by mapped distance") {
    // one weight per row, two bits, single active cell per row
    BitTile t{{2, 2}, {1, 2}};
    t.set_active(0, 1, true);   // row 0: bit 2^-2 at logical col 1
    t.set_active(1, 0, true);   // row 1: bit 2^-1 at logical col 0
    const double eta = 0.01;
    const NoiseModel model{eta, NoiseModel::Weighting::Distance};

    SUBCASE("identity plan, conventional orientation") {
        const WeightMatrix w = inject_noise(t, MdmPlan::identity(2), model, 1.0);
        CHECK_EQ(w.at(0, 0), doctest::Approx(0.25 * (1.0 - eta * 1.0)).epsilon(1e-12));
        CHECK_EQ(w.at(1, 0), doctest::Approx(0.5 * (1.0 - eta * 1.0)).epsilon(1e-12));
    }
    SUBCASE("swap plan moves rows to new distances") {
        const MdmPlan plan{{1, 0}, Dataflow::Conventional};
        const WeightMatrix w = inject_noise(t, plan, model, 1.0);
        // row 0 -> position 1, col 1 stays physical 1: d = 2
        CHECK_EQ(w.at(0, 0), doctest::Approx(0.25 * (1.0 - eta * 2.0)).epsilon(1e-12));
        // row 1 -> position 0, col 0 stays physical 0: d = 0
        CHECK_EQ(w.at(1, 0), doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("reversed dataflow mirrors the column distances") {
        const MdmPlan plan{{0, 1}, Dataflow::Reversed};
        const WeightMatrix w = inject_noise(t, plan, model, 1.0);
        // row 0 stays, col 1 -> physical 0: d = 0
        CHECK_EQ(w.at(0, 0), doctest::Approx(0.25).epsilon(1e-12));
        // row 1 stays, col 0 -> physical 1: d = 2
        CHECK_EQ(w.at(1, 0), doctest::Approx(0.5 * (1.0 - eta * 2.0)).epsilon(1e-12));
    }
    SUBCASE("zero eta reproduces dequantize exactly") {
        const NoiseModel clean{0.0, NoiseModel::Weighting::Distance};
        const WeightMatrix w = inject_noise(t, MdmPlan::identity(2), clean, 2.0);
        const WeightMatrix d = dequantize(t, 2.0);
        CHECK_EQ(w.at(0, 0), d.at(0, 0));
        CHECK_EQ(w.at(1, 0), d.at(1, 0));
    }
    SUBCASE("uniform weighting ignores position") {
        const NoiseModel uni{0.25, NoiseModel::Weighting::Uniform};
        const WeightMatrix w = inject_noise(t, MdmPlan::identity(2), uni, 1.0);
        CHECK_EQ(w.at(0, 0), doctest::Approx(0.25 * 0.75).epsilon(1e-12));
    }
    SUBCASE("eta large enough to flip a cell is rejected") {
        // identity plan puts both active cells at distance 1, so the product
        // eta * d_max crosses 1 exactly at eta = 1
        const NoiseModel big{1.0, NoiseModel::Weighting::Distance};
        CHECK_THROWS_AS(inject_noise(t, MdmPlan::identity(2), big, 1.0),
                        std::invalid_argument);
        // a swap plan stretches one cell to distance 2, so eta 0.6 now trips
        const NoiseModel medium{0.6, NoiseModel::Weighting::Distance};
        const MdmPlan swap{{1, 0}, Dataflow::Conventional};
        CHECK_THROWS_AS(inject_noise(t, swap, medium, 1.0), std::invalid_argument);
        CHECK_NOTHROW(inject_noise(t, MdmPlan::identity(2), medium, 1.0));
    }
}

TEST_CASE("accuracy proxy prefers the remapped tile under distance noise") {
    const auto dist = WeightDistribution::half_normal(0.05);
    const WeightMatrix w = sample_weight_matrix(dist, 64, 8, 99);
    const NoiseModel model{1e-3, NoiseModel::Weighting::Distance};
    const AccuracyResult r = accuracy_proxy(w, model, 20, 7);
    CHECK_EQ(r.trials + r.discarded, 20);
    CHECK_GT(r.baseline_err, 0.0);
    CHECK_LE(r.mdm_err, r.baseline_err);
    CHECK_GE(r.improved_or_tied, 19);

    SUBCASE("zero eta ties every trial at zero error") {
        const NoiseModel clean{0.0, NoiseModel::Weighting::Distance};
        const AccuracyResult c = accuracy_proxy(w, clean, 5, 7);
        CHECK_EQ(c.baseline_err, 0.0);
        CHECK_EQ(c.mdm_err, 0.0);
        CHECK_EQ(c.improved_or_tied, c.trials);
    }
    SUBCASE("deterministic for a fixed seed") {
        const AccuracyResult a = accuracy_proxy(w, model, 8, 3);
        const AccuracyResult b = accuracy_proxy(w, model, 8, 3);
        CHECK_EQ(a.baseline_err, b.baseline_err);
        CHECK_EQ(a.mdm_err, b.mdm_err);
    }
}

TEST_CASE("parallel_for covers every index exactly once and rethrows") {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h.store(0);
    parallel_for(257, 5, [&](int i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK_EQ(h.load(), 1);

    CHECK_THROWS_AS(
        parallel_for(8, 3, [](int i) { if (i == 5) throw std::runtime_error("boom"); }),
        std::runtime_error);
}

TEST_CASE("thread-count resolution honors the environment") {
    CHECK_EQ(resolve_threads(7), 7);
    ::setenv("MDM_THREADS", "3", 1);
    CHECK_EQ(resolve_threads(0), 3);
    ::unsetenv("MDM_THREADS");
    CHECK_EQ(resolve_threads(0), 1);
}
