#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vmad {

using Vec = std::vector<double>;

// Counter-based deterministic generator (splitmix64 finalizer over a
// keyed counter). Value-like: copy freely, send across threads. Streams
// derived via split() are independent of the parent and of each other,
// so per-path / per-target sub-streams can be laid out up front and a
// run with K+1 paths reuses the first K paths' draws bit for bit.
struct RngState {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    static RngState seeded(std::uint64_t seed);

    // Child stream identified by `stream`; does not advance this state.
    RngState split(std::uint64_t stream) const;

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double next_unit();

    // Standard normal via Box-Muller. Draws are consumed in pairs, so a
    // single next_normal() burns two uniforms; no spare is cached.
    double next_normal();
};

// dim i.i.d. standard normal components; advances rng deterministically.
Vec sample_standard_normal(std::size_t dim, RngState& rng);

void fill_standard_normal(std::span<double> out, RngState& rng);

} // namespace vmad
