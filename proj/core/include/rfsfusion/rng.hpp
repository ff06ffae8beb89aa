#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rfs {

/// Seedable random generator with samplers that are bit-identical across
/// platforms. std::mt19937_64 output is fully specified by the standard, but
/// the std distributions are not, so uniform/normal/Poisson draws are done
/// by hand here.
///
/// Independent streams are derived from a base seed and a stream path, e.g.
///   Rng::stream(base_seed, {run_index, sensor_index})
/// Every (run, sensor) pair gets its own generator, so adding a sensor or a
/// method never perturbs the draws of another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derive the generator for a (base_seed, path) stream.
    static Rng stream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> path);

    /// Uniform draw in [0, 1).
    double uniform();

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw (Box-Muller).
    double normal();

    /// Normal draw with the given mean and standard deviation.
    double normal(double mean, double stddev);

    /// Poisson draw by CDF inversion.
    int poisson(double rate);

    /// True with probability p.
    bool bernoulli(double p);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_normal_ = false;
};

/// SplitMix64 step, used to mix stream paths into seeds.
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace rfs
