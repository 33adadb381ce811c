#pragma once

#include <array>
#include <cstdint>

namespace qfisher {

/// Counter-based pseudorandom generator (Philox-2x64, 10 rounds).
///
/// The 128-bit counter is split as (stream, block): the stream id occupies the
/// high word, so distinct streams of the same key never overlap and a stream
/// can be reproduced in isolation. Simulation code derives one stream per
/// trial index from a single user seed, which makes trial-level parallelism
/// safe without coordinating generator state.
class Philox2x64 {
  public:
    using result_type = std::uint64_t;

    explicit Philox2x64(std::uint64_t key, std::uint64_t stream = 0) noexcept
        : key_(key), stream_(stream) {}

    result_type operator()() noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t stream() const noexcept { return stream_; }

  private:
    std::array<std::uint64_t, 2> block(std::uint64_t counter) const noexcept;

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2; // force a refill on the first draw
};

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Philox2x64 &gen) noexcept;

/// Standard normal variate (Box-Muller, two uniforms per draw).
double standard_normal(Philox2x64 &gen) noexcept;

} // namespace qfisher
