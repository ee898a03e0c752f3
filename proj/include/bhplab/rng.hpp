#pragma once

#include <cmath>
#include <cstdint>

namespace bhplab {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Fold extra keys into a seed; used to derive per-experiment and per-scale
// sub-seeds deterministically from one master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = seed;
    splitmix64(x);
    x ^= 0xD1B54A32D192ED03ULL * (a + 1);
    splitmix64(x);
    x ^= 0x8CB92BA72F3D8DD7ULL * (b + 1);
    return splitmix64(x);
}

// xoshiro256++ with one statistically independent stream per (seed, stream id).
// Streams are keyed by path index so that estimates do not depend on the
// worker count or scheduling order.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        s_[0] = splitmix64(x);
        s_[1] = splitmix64(x);
        s_[2] = splitmix64(x);
        s_[3] = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
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

    // Uniform on (0, 1]; never returns 0 so logs are safe.
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Knuth's product method; adequate for the small per-step intensities used
    // by the compound-Poisson samplers.
    long poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        long n = 0;
        while (lambda > 30.0) {  // split to keep exp(-lambda) away from underflow
            long m = poisson_small(30.0);
            n += m;
            lambda -= 30.0;
        }
        return n + poisson_small(lambda);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    long poisson_small(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = uniform();
        long n = 0;
        while (prod > limit) {
            prod *= uniform();
            ++n;
        }
        return n;
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace bhplab
