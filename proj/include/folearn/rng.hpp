#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace folearn {

// splitmix64, used both as a seed mixer and to derive named child streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), seed);
}

// Deterministic RNG. Child streams are derived from (base, name), so adding a
// new consumer never perturbs the draws of existing ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : base_(splitmix64(seed)), engine_(splitmix64(splitmix64(seed))) {}

    Rng child(const std::string& name) const {
        return Rng(base_ ^ fnv1a64(name));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). Rejection sampling keeps results identical across
    // platforms, unlike std::uniform_int_distribution.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do { v = engine_(); } while (v >= limit);
        return v % n;
    }

    int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

    // Bernoulli with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) {
        if (den == 0) throw std::invalid_argument("Rng::chance: zero denominator");
        return below(den) < num;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t base_;
    std::mt19937_64 engine_;
};

}  // namespace folearn
