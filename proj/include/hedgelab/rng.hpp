#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hedgelab::rng {

// splitmix64, used only to spread seeds into xoshiro state
inline uint64_t splitmix64(uint64_t& s) {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with one deterministic stream per (seed, stream) pair; the
// simulator assigns one stream per path so results do not depend on the
// thread layout
class Stream {
public:
    Stream(uint64_t seed, uint64_t stream_id) {
        uint64_t m = seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1));
        for (auto& w : s_) w = splitmix64(m);
        for (int k = 0; k < 4; ++k) next();
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }    // [0,1)
    double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }  // (0,1]

    double normal() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        cache_ = r * std::sin(a);
        have_cache_ = true;
        return r * std::cos(a);
    }

    double exponential() { return -std::log(uniform_pos()); }

    // Poisson: Knuth product for small means, Hormann's PTRS otherwise
    int64_t poisson(double mu) {
        if (mu <= 0.0) return 0;
        if (mu < 10.0) {
            const double limit = std::exp(-mu);
            int64_t k = 0;
            double prod = uniform_pos();
            while (prod > limit) {
                ++k;
                prod *= uniform_pos();
            }
            return k;
        }
        const double b = 0.931 + 2.53 * std::sqrt(mu);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double lmu = std::log(mu);
        while (true) {
            double u = uniform() - 0.5;
            double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<int64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * lmu - mu - std::lgamma(kf + 1.0))
                return static_cast<int64_t>(kf);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
    bool have_cache_ = false;
    double cache_ = 0.0;
};

}  // namespace hedgelab::rng
