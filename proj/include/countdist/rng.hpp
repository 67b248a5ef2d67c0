#pragma once

#include <cmath>
#include <cstdint>

namespace countdist {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Streams derived from (master seed, stream index) are independent and
/// bitwise-reproducible across platforms, which is what lets apply_mechanism
/// fan rows out to threads without changing the output.
inline uint64_t derive_stream_seed(uint64_t master, uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ with splitmix64 seeding. std::mt19937_64 would also do, but
/// its per-row construction cost dominates when every table row gets its own
/// stream, and the uniform-to-double mapping here is pinned explicitly.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) {
            x = splitmix64(x);
            word = x;
        }
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (-1/2, 1/2); the left endpoint would map to -infinity below.
    double uniform_centered() {
        for (;;) {
            const double u = uniform01() - 0.5;
            if (u != -0.5) return u;
        }
    }

    /// Laplace(b) via inverse CDF of a uniform in (-1/2, 1/2).
    double laplace(double scale) {
        const double u = uniform_centered();
        const double sign = u < 0 ? -1.0 : 1.0;
        return -scale * sign * std::log1p(-2.0 * std::fabs(u));
    }

    /// Normal(0, 1) via Box-Muller; explicit so results are platform-stable.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Bernoulli(p).
    bool bernoulli(double p) { return uniform01() < p; }

    /// Geometric over {0,1,...} with P(g) = (1-p) p^g for p in (0,1).
    uint64_t geometric(double p) {
        const double u = uniform01();
        const double g = std::floor(std::log1p(-u) / std::log(p));
        return g < 0 ? 0 : static_cast<uint64_t>(g);
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t state_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace countdist
