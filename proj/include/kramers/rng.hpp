#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kramers {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-sample random stream: the (seed, index) pair fully determines the
// sequence, so ensembles are reproducible for any worker count.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t index)
        : eng_(splitmix64(seed ^ splitmix64(index))) {}

    // Uniform in [0,1). Hand-rolled so the byte stream does not depend on
    // the standard library's distribution implementation.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Marsaglia polar method with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kramers
