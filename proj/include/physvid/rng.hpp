#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace physvid {

// splitmix64-based PRNG. Bit-stable across platforms and compilers, unlike
// std::uniform_real_distribution, so seeded pipelines reproduce byte-for-byte.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n), n > 0
    int uniform_int(int n) { return int(next_u64() % uint64_t(n)); }

    double normal() {
        // Box-Muller, cosine branch only; stateless apart from the counter.
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Derive an independent stream without disturbing this generator.
    Rng fork(uint64_t stream) const { return Rng(mix(state_, stream)); }
    Rng fork(std::string_view label) const { return fork(hash_label(label)); }

    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static uint64_t hash_label(std::string_view s) {
        uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    uint64_t state_;
};

}  // namespace physvid
