#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace shiftfuzz {

// std::mt19937_64's output sequence is fixed by the standard, but the std
// distributions are not, so the draws below are spelled out to keep runs
// bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [lo, hi], by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1U;
        if (span == 0U) {
            return static_cast<std::int64_t>(next());
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t draw = next();
        while (draw >= limit) {
            draw = next();
        }
        return lo + static_cast<std::int64_t>(draw % span);
    }

    // Uniform real in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11U) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; the spare value is dropped so the stream position depends
    // only on the number of calls.
    double normal(double mean, double sigma) {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        constexpr double kTwoPi = 6.283185307179586476925;
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

// Independent stream seed for (base, a, b), e.g. (run seed, scenario index, 0).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

}  // namespace shiftfuzz
