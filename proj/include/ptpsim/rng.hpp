#pragma once

// Deterministic random streams for the simulator. splitmix64 state with
// per-stream derivation from a root seed and a stream name, so adding or
// reordering one consumer never perturbs another stream's draws.
//
// Distributions are implemented here rather than with <random> because
// the standard leaves distribution algorithms unspecified; these use only
// IEEE-754 add/mul, which makes traces byte-identical across platforms.

#include <cstdint>
#include <string_view>

namespace ptpsim::netsim {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream derived from (seed, name).
    static Rng stream(std::uint64_t seed, std::string_view name);

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01();

    // Uniform in [-a, +a].
    double uniform_pm(double a);

    // Zero-mean gaussian approximation (Irwin-Hall with 12 uniforms),
    // clamped at 4 sigma. Unit variance is exact; the clamp discards a
    // negligible tail mass.
    double gaussian(double sigma);

    bool bernoulli(double p);

private:
    std::uint64_t state_;
};

// FNV-1a 64-bit; also used for scenario content digests.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace ptpsim::netsim
