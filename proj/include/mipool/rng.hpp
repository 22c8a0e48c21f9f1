#pragma once

#include <array>
#include <cstdint>

namespace mipool {

// Counter-based generator (Philox4x32-10). The 64-bit seed is the key; the
// stream id occupies the upper half of the 128-bit counter and the draw
// position the lower half, so every (seed, stream_id) pair addresses a
// disjoint block sequence of length 2^64. Output is a pure function of
// (seed, stream_id, position) and does not depend on platform or threading.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return counter_; }

  // Child stream with the same key and a stream id derived from
  // (stream_id, index). Does not advance this stream.
  RngStream fork(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  // Standard normal via the polar Box-Muller method; the second variate of
  // each accepted pair is cached.
  double normal() noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Raw Philox4x32-10 bijection, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

// SplitMix64 finalizer; used to derive stream ids from structured keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace mipool
