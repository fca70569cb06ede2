#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace graphvario {

/// Stream tags used to derive independent substreams from one user seed.
enum class Stream : std::uint64_t {
    positions = 0x706f73u,
    field = 0x666c64u,
};

/// SplitMix64 finalizer. Advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Counter-based seed derivation: the seed for (stream, index) does not
/// depend on how many other indices were drawn before it.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept;

/// Portable generator: mt19937_64 bits with hand-rolled conversions, so the
/// produced doubles do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Standard normal via Box-Muller; caches the second variate.
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Runs fn(index) for index in [0, count) over at most `threads` workers.
/// Work is split into contiguous blocks; fn must only write to per-index state.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn);

}  // namespace graphvario

#include "graphvario/detail/parallel.hpp"
