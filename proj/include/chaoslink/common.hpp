#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chaoslink {

// Thrown for bad arguments, malformed files, or violated preconditions.
// The CLI maps this to exit code 2.
struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A trajectory left the representable range. Carries the offending step so the
// caller can report where integration blew up instead of silently clamping.
struct divergence_error : std::runtime_error {
    std::size_t step;
    explicit divergence_error(std::size_t at)
        : std::runtime_error("trajectory diverged at step " + std::to_string(at)), step(at) {}
};

// Execution policy for the data-parallel kernels. Every kernel has a plain
// serial loop kept as the reference; the parallel path must produce
// bit-identical results (disjoint output slots, per-index derived seeds).
enum class Exec { serial, parallel };

// splitmix64 — tiny, well-mixed, and fully specified, unlike the standard
// library engines whose distributions are implementation-defined.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic per-task seed derivation; used so grid points / blocks can be
// processed in any order (or in parallel) with identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

}  // namespace chaoslink
