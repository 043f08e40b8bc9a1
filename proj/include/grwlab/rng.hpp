#pragma once

#include <cstddef>
#include <cstdint>

namespace grw {

// Counter-based SplitMix64 stream. Draw i depends only on (seed, stream id, i), so sequences
// are identical on every platform and independent streams can be derived by index.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t next_u64() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Uniform on (0, 1].
    double uniform_open_below() noexcept;
    double exponential(double rate) noexcept;
    std::size_t uniform_index(std::size_t n) noexcept;

    // Child stream for trial `index`; depends only on this stream's seed and id.
    RngStream derive(std::uint64_t index) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace grw
