#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace svt {

// splitmix64 step, used to mix seed material into well-spread 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Combines seed words into one stream seed. Order matters.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t state = 0x8f1bbcdcbfa53e0bULL;
    std::uint64_t out = 0;
    for (std::uint64_t p : parts) {
        state ^= p;
        out = splitmix64(state);
    }
    return out;
}

// Deterministic RNG. mt19937_64 is fully specified by the standard; the
// draw helpers below avoid std::*_distribution, whose output is
// implementation-defined, so streams are reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + uniform() * (hi - lo);
    }

    // unbiased uniform integer in [0, n); n must be > 0
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal via Box-Muller; two uniforms per draw, no cached state
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // first k entries of a Fisher-Yates shuffle of items; k <= items.size()
    template <typename T>
    std::vector<T> sample_without_replacement(std::vector<T> items,
                                              std::size_t k) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(
                                          below(items.size() - i));
            std::swap(items[i], items[j]);
        }
        items.resize(k);
        return items;
    }

    // Floyd's algorithm: k distinct indices from [0, n), returned sorted
    std::vector<std::uint64_t> sample_indices(std::uint64_t n,
                                              std::uint64_t k) {
        std::vector<std::uint64_t> chosen;
        chosen.reserve(k);
        for (std::uint64_t j = n - k; j < n; ++j) {
            const std::uint64_t t = below(j + 1);
            if (std::find(chosen.begin(), chosen.end(), t) != chosen.end())
                chosen.push_back(j);
            else
                chosen.push_back(t);
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace svt
