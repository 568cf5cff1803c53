#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace egad {

/// Seeded random source. Distributions are implemented here rather than
/// through <random> so sequences do not depend on the standard library vendor.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Derives an independent seed for a named sub-stream of the master seed,
/// e.g. stream_seed(seed, "offspring", generation, index).
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0)
{
    std::uint64_t h = detail::splitmix64(master ^ detail::fnv1a(name));
    h = detail::splitmix64(h ^ a);
    h = detail::splitmix64(h ^ (b * 0xd1b54a32d192ed03ULL));
    return h;
}

inline Rng stream(std::uint64_t master, std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0)
{
    return Rng(stream_seed(master, name, a, b));
}

} // namespace egad
