#include "bisched/rng.hpp"

#include <cmath>

namespace bisched {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), engine_(splitmix64(master_seed ^ splitmix64(stream_id))) {}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
    return -std::log1p(-uniform01()) / rate;
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
}

}  // namespace bisched
