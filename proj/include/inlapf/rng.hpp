#ifndef INLAPF_RNG_HPP
#define INLAPF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "inlapf/errors.hpp"

namespace inlapf {

/// splitmix64 finalizer.  Used for seeding and for deriving substream seeds.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for logical substream `stream` of a base seed.
///
/// Equals the (stream+1)-th output of a splitmix64 generator whose state
/// starts at `base`, computed in O(1).  Distinct streams give statistically
/// independent xoshiro256++ states; the mapping is fixed so runs are
/// reproducible across platforms.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64_mix(base + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

/// xoshiro256++ generator with splitmix64 seeding.
///
/// All distributions are implemented on top of uniform01() with fixed
/// algorithms (Box-Muller normals, chunked inversion Poisson,
/// Marsaglia-Tsang gamma) so that a given seed yields the same stream of
/// variates on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 sequence seeded with `seed`
        std::uint64_t z = seed;
        for (auto& si : s_) {
            z += 0x9E3779B97F4A7C15ULL;
            si = splitmix64_mix(z);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (two uniforms per variate).
    double normal() {
        const double u1 = 1.0 - uniform01(); // in (0, 1]: log is finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    std::vector<double> normals(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = normal();
        return out;
    }

    /// Poisson(mean) by multiplicative inversion, in chunks of mean 30 so the
    /// running product never underflows.  Cost is O(mean) uniforms, which is
    /// fine for the moderate intensities used here.
    long poisson(double mean) {
        if (!(mean >= 0.0) || !std::isfinite(mean))
            throw InvalidParams("poisson: mean must be finite and >= 0");
        long k = 0;
        double remaining = mean;
        const double chunk = 30.0;
        while (remaining > chunk) {
            k += poisson_small(chunk);
            remaining -= chunk;
        }
        return k + poisson_small(remaining);
    }

    /// Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 handled by boosting.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw InvalidParams("gamma: shape and rate must be > 0");
        if (shape < 1.0) {
            const double u = 1.0 - uniform01(); // (0, 1]
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = 1.0 - uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    long poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = 1.0;
        for (;;) {
            prod *= 1.0 - uniform01(); // (0, 1]
            if (prod <= limit) return k;
            ++k;
        }
    }

    std::uint64_t s_[4];
};

} // namespace inlapf

#endif
