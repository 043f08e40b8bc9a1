#include "grwlab/rng.hpp"

#include <cmath>
#include <limits>

namespace grw {
namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(splitmix64_mix(seed ^ splitmix64_mix(stream_id + kGamma))) {}

std::uint64_t RngStream::next_u64() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGamma);
}

double RngStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open_below() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

double RngStream::exponential(double rate) noexcept { return -std::log(uniform_open_below()) / rate; }

std::size_t RngStream::uniform_index(std::size_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return static_cast<std::size_t>(v % bound);
}

RngStream RngStream::derive(std::uint64_t index) const noexcept {
    return RngStream(seed_, splitmix64_mix(stream_id_ ^ splitmix64_mix(index + 1)));
}

}  // namespace grw
