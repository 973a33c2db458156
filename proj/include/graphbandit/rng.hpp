// Seeded random streams and the seed-derivation hash used by the harness.
// Reproducibility contract: same build + same (base_seed, tags, indices)
// gives the same stream. No cross-build or cross-platform bit promises.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace graphbandit {

namespace detail {

// splitmix64 finalizer (Steele/Lea/Flood); full-avalanche over 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

inline std::uint64_t fold_seed(std::uint64_t h, std::uint64_t v) {
    return detail::mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t fold_seed(std::uint64_t h, std::string_view tag) {
    return fold_seed(h, detail::fnv1a(tag));
}

// derive_seed(base, "env", replication) and friends. Order-sensitive fold.
template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t base, Parts&&... parts) {
    std::uint64_t h = detail::mix64(base);
    ((h = fold_seed(h, std::forward<Parts>(parts))), ...);
    return h;
}

// Counter-based coin in [0,1): pure function of its arguments. Used by the
// gnp generator so edge membership is independent of iteration order.
inline double unit_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = derive_seed(seed, a, b);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// A single-owner random stream. Wraps mt19937_64; all variate generation in
// the library goes through uniform()/normal() so draw counts are explicit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::mix64(seed)) {}

    // Uniform on [0,1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1]; never returns 0 (safe under log/pow).
    double uniform_pos() { return 1.0 - uniform(); }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        double x, y, s;
        do {
            x = 2.0 * uniform() - 1.0;
            y = 2.0 * uniform() - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        return x * std::sqrt(-2.0 * std::log(s) / s);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace graphbandit
