#pragma once

#include <cstdint>
#include <limits>

namespace kquad {

// SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Combines words into one well-mixed 64-bit key.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

/// Counter-based random stream. The i-th output is mix64(key + i * gamma)
/// with key derived from (seed, stream id), so any (seed, id) pair is
/// reproducible on its own and distinct ids give unrelated sequences.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

  // Child stream for resampling attempts; independent of this one.
  RngStream split(std::uint64_t sub_id) const noexcept;

  std::uint64_t operator()() noexcept;
  // Uniform on [0,1) with 53 random bits.
  double uniform() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kquad
