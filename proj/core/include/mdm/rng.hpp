#ifndef MDM_RNG_HPP
#define MDM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mdm::rng {

// splitmix64 finalizer. Cheap, full-avalanche, and identical on every
// platform, which keeps all sampled experiments bit-reproducible.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Value of counter slot i in the stream identified by `seed`.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t i) {
    return mix64(seed + (i + 1) * kGolden);
}

// Derives an independent child stream seed, e.g. one per tile of a batch.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ 0xD6E8FEB86659FD93ull) + (index + 1) * kGolden;
}

// Uniform double in [0, 1) from 53 high bits.
inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Sequential view over a counter-based stream.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return at(seed_, counter_++); }
    double next_unit() { return to_unit(next_u64()); }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Inverse-CDF exponential sample from a uniform u in [0, 1).
inline double exponential_from_unit(double lambda, double u) {
    return -std::log1p(-u) / lambda;
}

// |N(0, sigma^2)| via Box-Muller from two uniforms.
inline double half_normal_from_units(double sigma, double u1, double u2) {
    const double two_pi = 6.283185307179586476925286766559;
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return std::fabs(r * std::cos(two_pi * u2)) * sigma;
}

}  // namespace mdm::rng

#endif
