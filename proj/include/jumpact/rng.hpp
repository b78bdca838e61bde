#pragma once

#include <cstdint>
#include <random>

namespace jumpact {

// SplitMix64 step; also the basis of deterministic stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream splitting: hashes (master_seed, case_index, replication)
// into an independent 64-bit stream seed. Fixed for the life of the project:
// raw records of a Monte Carlo run are a pure function of the experiment spec.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t case_index,
                                        std::uint64_t replication) {
    std::uint64_t s = master_seed;
    std::uint64_t h = splitmix64(s);
    s = h ^ (0xA0761D6478BD642FULL * (case_index + 1));
    h = splitmix64(s);
    s = h ^ (0xE7037ED1A0B428DBULL * (replication + 1));
    return splitmix64(s);
}

// Random stream with explicitly pinned transforms, so draws depend only on the
// seed and this code, not on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform on (0,1), both endpoints excluded
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller; one value cached
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Exact Poisson draw. Product-of-uniforms for small means, recursive
    // splitting (sum of independent halves) above that.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 30.0) {
            const double half = 0.5 * mean;
            return poisson(half) + poisson(mean - half);
        }
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace jumpact
