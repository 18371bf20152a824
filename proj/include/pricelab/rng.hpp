#pragma once

#include <cstddef>
#include <cstdint>

namespace pricelab {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele/Lea/Flood, as popularized by Vigna).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based SplitMix64 stream whose start state is derived from a
// (seed, stream id) pair. One master seed can therefore drive several
// statistically independent substreams -- customer arrivals, purchase
// events, exploration -- without cross-talk between them.
class RandomStream {
 public:
  RandomStream() noexcept : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : state_(mix64(mix64(seed + kGoldenGamma) ^
                     (stream_id * kGoldenGamma + 0x123456789abcdefULL))) {}

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return next_unit() < p; }

  // Uniform index in [0, n) via the 128-bit multiply-shift reduction.
  std::size_t next_index(std::size_t n) noexcept {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

enum class StreamPurpose : std::uint64_t {
  customer = 1,
  purchase = 2,
  exploration = 3,
  benchmark = 4,
  histogram = 5,
};

// Salt distinguishes instances with the same purpose, e.g. per-agent
// exploration streams or per-cell benchmark sampling.
inline RandomStream derive_stream(std::uint64_t seed, StreamPurpose purpose,
                                  std::uint64_t salt = 0) noexcept {
  return RandomStream(seed, (salt << 8) | static_cast<std::uint64_t>(purpose));
}

}  // namespace pricelab
