#include "ptpsim/rng.hpp"

namespace ptpsim::netsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ull;
    }
    return h;
}

Rng Rng::stream(std::uint64_t seed, std::string_view name) {
    // Mix the name hash through one splitmix round so nearby seeds do not
    // produce correlated streams.
    std::uint64_t s = seed ^ fnv1a64(name);
    splitmix64(s);
    return Rng(s);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pm(double a) {
    return (2.0 * uniform01() - 1.0) * a;
}

double Rng::gaussian(double sigma) {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) acc += uniform01();
    double z = acc - 6.0;
    if (z > 4.0) z = 4.0;
    if (z < -4.0) z = -4.0;
    return z * sigma;
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

}  // namespace ptpsim::netsim
