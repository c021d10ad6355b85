#include <cmath>

#include "doctest.h"
#include "mdm/bitslice.hpp"
#include "mdm/rng.hpp"

using namespace mdm;

namespace {

WeightMatrix single(double v) {
    WeightMatrix w(1, 1);
    w.at(0, 0) = v;
    return w;
}

// Exact cell-occupancy probability for bit k (cell size L = 2^-k): mass of
// the upper half of every cell, via the closed-form CDF. Independent of the
// sampling path under test.
double exact_p(const WeightDistribution& dist, int k) {
    const double L = std::ldexp(1.0, -k);
    auto cdf = [&](double x) {
        if (dist.kind == WeightDistribution::Kind::Exponential)
            return 1.0 - std::exp(-dist.param * x);
        return std::erf(x / (dist.param * std::sqrt(2.0)));  // half-normal
    };
    double p = 0.0;
    for (int m = 0;; ++m) {
        const double lo = m * L + L / 2.0, hi = (m + 1) * L;
        const double mass = cdf(hi) - cdf(lo);
        p += mass;
        if (1.0 - cdf(hi) < 1e-15) break;
    }
    return p;
}

}  // namespace

TEST_CASE("quantize reproduces hand-computed expansions") {
    const std::vector<int> sigs{1, 2, 3};
    SUBCASE("0.625 -> (1,0,1)") {
        const QuantizeResult q = quantize(single(0.625), sigs);
        CHECK_EQ(q.scale, 1.0);
        CHECK(q.tile.active(0, 0));
        CHECK_FALSE(q.tile.active(0, 1));
        CHECK(q.tile.active(0, 2));
    }
    SUBCASE("0.5 -> (1,0,0)") {
        const QuantizeResult q = quantize(single(0.5), sigs);
        CHECK(q.tile.active(0, 0));
        CHECK_FALSE(q.tile.active(0, 1));
        CHECK_FALSE(q.tile.active(0, 2));
    }
    SUBCASE("below resolution -> all zero") {
        const QuantizeResult q = quantize(single(0.0625), sigs);
        CHECK_EQ(q.tile.active_count(), 0);
    }
    SUBCASE("sign is dropped") {
        const QuantizeResult q = quantize(single(-0.625), sigs);
        CHECK(q.tile.active(0, 0));
        CHECK(q.tile.active(0, 2));
    }
}

TEST_CASE("quantize normalizes out-of-range matrices onto the top bit") {
    WeightMatrix w(2, 1);
    w.at(0, 0) = 6.0;
    w.at(1, 0) = 1.5;
    const QuantizeResult q = quantize(w, {1, 2, 3});
    // scale maps the max magnitude to the top-bit value 2^-1
    CHECK_EQ(q.scale, 12.0);
    CHECK(q.tile.active(0, 0));
    CHECK_FALSE(q.tile.active(0, 1));
    CHECK_FALSE(q.tile.active(0, 2));
    // 1.5/12 = 0.125 -> third bit exactly
    CHECK(q.tile.active(1, 2));
    CHECK_EQ(dequantize(q.tile, q.scale).at(0, 0), 6.0);
    CHECK_EQ(dequantize(q.tile, q.scale).at(1, 0), 1.5);
}

TEST_CASE("quantize validates its inputs") {
    CHECK_THROWS_AS(quantize(single(0.5), {}), std::invalid_argument);
    CHECK_THROWS_AS(quantize(single(0.5), {1, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(quantize(single(0.5), {3, 2, 1}), std::invalid_argument);
    WeightMatrix nan = single(std::nan(""));
    CHECK_THROWS_AS(quantize(nan, {1, 2}), std::invalid_argument);
}

TEST_CASE("dequantize bounds the truncation residual") {
    const std::vector<int> sigs = contiguous_significances(1, 8);
    for (std::uint64_t i = 0; i < 300; ++i) {
        WeightMatrix w(1, 1);
        w.at(0, 0) = rng::to_unit(rng::at(17, i)) * 40.0;  // forces rescaling too
        const QuantizeResult q = quantize(w, sigs);
        const double hat = dequantize(q.tile, q.scale).at(0, 0);
        const double resid = w.at(0, 0) - hat;
        CHECK_GE(resid, 0.0);
        CHECK_LT(resid, q.scale * std::ldexp(1.0, -sigs.back()));
    }
}

TEST_CASE("grouped quantization lays columns out significance-major") {
    WeightMatrix w(1, 2);
    w.at(0, 0) = 0.625;   // bits 1,0,1
    w.at(0, 1) = 0.375;   // bits 0,1,1
    const QuantizeResult q = quantize(w, {1, 2, 3});
    REQUIRE_EQ(q.tile.cols(), 6);
    CHECK_EQ(q.tile.weights_per_row, 2);
    // column s*G + w holds bit s of weight w
    CHECK(q.tile.active(0, 0));         // w0 bit0
    CHECK_FALSE(q.tile.active(0, 1));   // w1 bit0
    CHECK_FALSE(q.tile.active(0, 2));   // w0 bit1
    CHECK(q.tile.active(0, 3));         // w1 bit1
    CHECK(q.tile.active(0, 4));         // w0 bit2
    CHECK(q.tile.active(0, 5));         // w1 bit2

    const WeightMatrix back = dequantize(q.tile, q.scale);
    CHECK_EQ(back.at(0, 0), 0.625);
    CHECK_EQ(back.at(0, 1), 0.375);
}

TEST_CASE("column density counts active fractions") {
    BitTile t{{4, 2}, {0, 1}};
    t.set_active(0, 0, true);
    t.set_active(1, 0, true);
    t.set_active(2, 1, true);
    const auto d = column_density(t);
    CHECK_EQ(d[0], doctest::Approx(0.5));
    CHECK_EQ(d[1], doctest::Approx(0.25));
}

TEST_CASE("distribution densities at zero") {
    CHECK_EQ(WeightDistribution::exponential(1.0).density_at_zero(), 1.0);
    CHECK_EQ(WeightDistribution::exponential(2.5).density_at_zero(), 2.5);
    CHECK_EQ(WeightDistribution::half_normal(1.0).density_at_zero(),
             doctest::Approx(0.7978845608028654).epsilon(1e-12));
    CHECK_EQ(WeightDistribution::half_normal(0.05).density_at_zero(),
             doctest::Approx(0.7978845608028654 / 0.05).epsilon(1e-12));
    CHECK_THROWS_AS(WeightDistribution::empirical({1.0}).density_at_zero(),
                    std::invalid_argument);
}

TEST_CASE("distribution sampling is counter-deterministic") {
    const auto d = WeightDistribution::half_normal(0.3);
    CHECK_EQ(d.sample(5, 9), d.sample(5, 9));
    CHECK_NE(d.sample(5, 9), d.sample(5, 10));
    CHECK_NE(d.sample(5, 9), d.sample(6, 9));

    const auto e = WeightDistribution::empirical({1.0, 2.0, 3.0});
    for (std::uint64_t i = 0; i < 20; ++i) {
        const double v = e.sample(1, i);
        CHECK((v == 1.0 || v == 2.0 || v == 3.0));
    }
}

TEST_CASE("measured bit frequencies match the closed-form cell masses") {
    const std::uint64_t n = 100000;
    // 4 sigma of binomial noise at p ~ 1/2
    const double tol = 4.0 * std::sqrt(0.25 / static_cast<double>(n));
    for (const auto& dist : {WeightDistribution::exponential(1.0),
                             WeightDistribution::exponential(0.7),
                             WeightDistribution::half_normal(1.0)}) {
        const SparsityReport r = verify_sparsity_bound(dist, n, 6, 33);
        for (const auto& col : r.columns)
            CHECK_LE(std::fabs(col.p_hat - exact_p(dist, col.k)), tol);
        CHECK(r.all_ok());
    }
}

TEST_CASE("unit-rate exponential hits the frozen closed-form density of bit 0") {
    // (e^{-1/2} - e^{-1}) / (1 - e^{-1})
    const double expected = 0.37754066879814546;
    CHECK_EQ(exact_p(WeightDistribution::exponential(1.0), 0),
             doctest::Approx(expected).epsilon(1e-12));
    const SparsityReport r =
        verify_sparsity_bound(WeightDistribution::exponential(1.0), 200000, 8, 101);
    CHECK_LE(std::fabs(r.columns[0].p_hat - expected), 0.005);
}

TEST_CASE("bit extraction agrees with quantize on in-range samples") {
    const std::vector<int> sigs = contiguous_significances(1, 8);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const double w = rng::to_unit(rng::at(71, i));
        const QuantizeResult q = quantize(single(w), sigs);
        REQUIRE_EQ(q.scale, 1.0);
        for (int k = 0; k < 8; ++k) {
            // bit of cell size 2^-k is the binary digit of value 2^-(k+1)
            const bool upper_half = (static_cast<long long>(std::floor(std::ldexp(w, k + 1))) & 1) != 0;
            CHECK_EQ(q.tile.active(0, k), upper_half);
        }
    }
}

TEST_CASE("sparsity check rejects unusable inputs") {
    CHECK_THROWS_AS(verify_sparsity_bound(WeightDistribution::empirical({1.0}), 100000, 4, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_sparsity_bound(WeightDistribution::exponential(1.0), 100, 4, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_sparsity_bound(WeightDistribution::exponential(1.0), 100000, 0, 0),
                    std::invalid_argument);
}
