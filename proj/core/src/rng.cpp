#include "rfsfusion/rng.hpp"

#include "rfsfusion/errors.hpp"

#include <cmath>
#include <numbers>

namespace rfs {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng Rng::stream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = base_seed;
    std::uint64_t seed = splitmix64(state);
    for (std::uint64_t p : path) {
        state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        seed = splitmix64(state);
    }
    return Rng(seed);
}

double Rng::uniform() {
    // 53 random bits -> double in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // Box-Muller; u1 shifted away from 0 so log is finite.
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

double Rng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

int Rng::poisson(double rate) {
    if (rate < 0.0) {
        throw InvalidParameterError("poisson rate must be nonnegative");
    }
    if (rate == 0.0) {
        return 0;
    }
    // Inversion by sequential search; fine for the rates used here (~15).
    const double u = uniform();
    double p = std::exp(-rate);
    double cdf = p;
    int k = 0;
    while (u > cdf && k < 10000) {
        ++k;
        p *= rate / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

bool Rng::bernoulli(double p) {
    return uniform() < p;
}

} // namespace rfs
