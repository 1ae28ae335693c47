#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, purpose, stream, index), so results do not depend on evaluation
// order or on how work is split across threads.

#include <array>
#include <cstdint>

namespace unifx {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  // Ten-round Philox-4x32 bijection.
  static Counter block(Counter ctr, Key key) noexcept;
};

enum class StreamPurpose : std::uint32_t {
  sample = 1,
  background = 2,
  conditional = 3,
  permutation = 4,
  eval_points = 5,
  noise = 6,
  subsample = 7,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream = 0) noexcept;

  Philox4x32::Counter bits(std::uint64_t index) const noexcept;
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform(std::uint64_t index) const noexcept;
  // Standard normal via Box-Muller on one block.
  double normal(std::uint64_t index) const noexcept;

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
};

// Sequential view over a CounterRng, for algorithms that consume an unknown
// number of draws (rejection sampling, shuffles).
class RngCursor {
 public:
  explicit RngCursor(CounterRng rng, std::uint64_t start = 0) noexcept : rng_(rng), next_(start) {}

  std::uint32_t next_u32() noexcept;
  // Unbiased integer in [0, n); n must be positive.
  std::uint32_t below(std::uint32_t n) noexcept;

 private:
  CounterRng rng_;
  std::uint64_t next_;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace unifx
