#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bisched {

// Deterministic generator: std::mt19937_64 (output sequence fixed by the C++
// standard) with per-stream seeds derived from one master seed through
// SplitMix64. Distributions are computed here rather than with <random>
// distribution classes, whose output is implementation-defined.
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-substreams";

    explicit Rng(std::uint64_t master_seed, std::uint64_t stream_id = 0);

    // Independent generator for another stream of the same master seed.
    Rng substream(std::uint64_t stream_id) const { return Rng(master_seed_, stream_id); }

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    // Exponential variate with the given rate (events per unit).
    double exponential(double rate);
    bool bernoulli(double p);

    std::uint64_t master_seed() const { return master_seed_; }

private:
    std::uint64_t master_seed_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bisched
