#include "mdm/bitslice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdm/rng.hpp"

namespace mdm {

WeightDistribution WeightDistribution::exponential(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("exponential rate must be positive and finite");
    WeightDistribution d;
    d.kind = Kind::Exponential;
    d.param = lambda;
    return d;
}

WeightDistribution WeightDistribution::half_normal(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("half-normal scale must be positive and finite");
    WeightDistribution d;
    d.kind = Kind::HalfNormal;
    d.param = sigma;
    return d;
}

WeightDistribution WeightDistribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical distribution needs samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw std::invalid_argument("empirical samples must be finite");
    WeightDistribution d;
    d.kind = Kind::Empirical;
    d.samples = std::move(samples);
    return d;
}

double WeightDistribution::density_at_zero() const {
    switch (kind) {
        case Kind::Exponential: return param;
        case Kind::HalfNormal: return std::sqrt(2.0 / 3.14159265358979323846) / param;
        case Kind::Empirical:
            throw std::invalid_argument("empirical distribution has no analytic density");
    }
    throw std::logic_error("unreachable");
}

double WeightDistribution::sample(std::uint64_t seed, std::uint64_t index) const {
    switch (kind) {
        case Kind::Exponential:
            return rng::exponential_from_unit(param, rng::to_unit(rng::at(seed, 2 * index)));
        case Kind::HalfNormal:
            return rng::half_normal_from_units(param, rng::to_unit(rng::at(seed, 2 * index)),
                                               rng::to_unit(rng::at(seed, 2 * index + 1)));
        case Kind::Empirical:
            return samples[rng::at(seed, 2 * index) % samples.size()];
    }
    throw std::logic_error("unreachable");
}

std::string WeightDistribution::name() const {
    switch (kind) {
        case Kind::Exponential: return "exponential(" + std::to_string(param) + ")";
        case Kind::HalfNormal: return "half_normal(" + std::to_string(param) + ")";
        case Kind::Empirical: return "empirical(n=" + std::to_string(samples.size()) + ")";
    }
    throw std::logic_error("unreachable");
}

QuantizeResult quantize(const WeightMatrix& weights, const std::vector<int>& significances,
                        Dataflow dataflow) {
    weights.validate();
    if (significances.empty()) throw std::invalid_argument("significance list must be non-empty");
    for (std::size_t i = 1; i < significances.size(); ++i)
        if (significances[i] <= significances[i - 1])
            throw std::invalid_argument("significances must be strictly increasing");
    if (weights.rows < 1 || weights.cols < 1)
        throw std::invalid_argument("quantize needs a non-empty weight matrix");

    const int kb = static_cast<int>(significances.size());
    const int g = weights.cols;

    double max_abs = 0.0;
    for (double v : weights.values) max_abs = std::max(max_abs, std::fabs(v));

    // Top bit holds 2^-e0; the representable range is [0, 2^(1-e0)). Values
    // already inside keep scale 1 (bits are exact truncations); otherwise the
    // matrix is normalized so the largest magnitude sits on the top bit.
    const double top_bit = std::ldexp(1.0, -significances[0]);
    double scale = 1.0;
    if (max_abs >= 2.0 * top_bit) scale = max_abs / top_bit;

    QuantizeResult out{
        BitTile({weights.rows, g * kb, dataflow}, expand_significances(significances, g), g),
        scale};

    for (int r = 0; r < weights.rows; ++r) {
        for (int w = 0; w < g; ++w) {
            double rem = std::fabs(weights.at(r, w)) / scale;
            for (int s = 0; s < kb; ++s) {
                const double bit = std::ldexp(1.0, -significances[s]);
                if (rem >= bit) {
                    out.tile.set_active(r, s * g + w, true);
                    rem -= bit;
                }
            }
        }
    }
    return out;
}

WeightMatrix dequantize(const BitTile& tile, double scale) {
    tile.validate();
    if (!std::isfinite(scale)) throw std::invalid_argument("scale must be finite");
    const int g = tile.weights_per_row;
    WeightMatrix w(tile.rows(), g);
    for (int r = 0; r < tile.rows(); ++r)
        for (int c = 0; c < tile.cols(); ++c)
            if (tile.active(r, c))
                w.at(r, c % g) += scale * std::ldexp(1.0, -tile.significances[c]);
    return w;
}

std::vector<double> column_density(const BitTile& tile) {
    tile.validate();
    std::vector<double> density(tile.cols(), 0.0);
    for (int j = 0; j < tile.rows(); ++j)
        for (int c = 0; c < tile.cols(); ++c)
            if (tile.active(j, c)) density[c] += 1.0;
    for (double& d : density) d /= tile.rows();
    return density;
}

bool SparsityReport::all_ok() const {
    return std::all_of(columns.begin(), columns.end(),
                       [](const SparsityColumn& c) { return c.ok; });
}

SparsityReport verify_sparsity_bound(const WeightDistribution& dist, std::uint64_t n,
                                     int bit_depth, std::uint64_t seed) {
    if (dist.kind == WeightDistribution::Kind::Empirical)
        throw std::invalid_argument("sparsity bound check needs an analytic distribution");
    if (n < 10000) throw std::invalid_argument("sparsity bound check needs n >= 10^4 samples");
    if (bit_depth < 1) throw std::invalid_argument("bit depth must be >= 1");

    // Bit k partitions the axis into cells of size L = 2^-k; the bit is set
    // when the sample falls in the upper half of its cell, i.e. when
    // floor(w * 2^(k+1)) is odd.
    std::vector<std::uint64_t> ones(bit_depth, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double w = dist.sample(seed, i);
        for (int k = 0; k < bit_depth; ++k) {
            const auto cells = static_cast<long long>(std::floor(std::ldexp(w, k + 1)));
            ones[k] += static_cast<std::uint64_t>(cells & 1LL);
        }
    }

    SparsityReport report;
    report.distribution = dist.name();
    report.n = n;
    report.f0 = dist.density_at_zero();
    for (int k = 0; k < bit_depth; ++k) {
        SparsityColumn col;
        col.k = k;
        col.p_hat = static_cast<double>(ones[k]) / static_cast<double>(n);
        col.bound = report.f0 * std::ldexp(1.0, -(k + 2));
        const double sigma = std::sqrt(0.25 / static_cast<double>(n));
        col.ok = col.p_hat < 0.5 + 3.0 * sigma &&
                 std::fabs(col.p_hat - 0.5) <= col.bound + 3.0 * sigma;
        report.columns.push_back(col);
    }
    return report;
}

}  // namespace mdm
