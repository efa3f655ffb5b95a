#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace mpar {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** with hand-rolled double transforms. std::* distributions are not
// bit-stable across standard libraries; experiment reruns must be byte-identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0,1), both ends excluded so log() stays finite and nonzero
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // inverse-CDF draw; lambda <= 0 yields +infinity (the event never fires)
    double exponential(double lambda) {
        if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(next_unit()) / lambda;
    }

    double normal(double mean, double stddev) {
        if (cached_) {
            cached_ = false;
            return mean + stddev * cache_;
        }
        // Marsaglia polar method
        double u, v, q;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        cache_ = v * f;
        cached_ = true;
        return mean + stddev * u * f;
    }

    std::uint64_t bounded(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4]{};
    double cache_ = 0.0;
    bool cached_ = false;
};

// Stable stream derivation: mixing a master seed with a textual purpose tag and
// an index gives independent streams whose identity does not depend on how many
// other streams exist (adding sweep points never reshuffles earlier runs).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t h = master ^ 0x9e3779b97f4a7c15ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h = splitmix64(h);
    }
    h ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t st = h;
    return splitmix64(st);
}

} // namespace mpar
