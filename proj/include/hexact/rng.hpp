#pragma once
#include <array>
#include <cstdint>

namespace hexact {

// Deterministic uniform stream (xoshiro256** seeded through SplitMix64).
// A stream is single-owner; parallel work splits per-path child streams.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed);

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double next_uniform();
  std::uint64_t next_u64();

  // Independent, reproducible child stream.  The child depends only on this
  // stream's seed key and the index, not on how many draws were consumed.
  [[nodiscard]] RngStream split(std::uint64_t child_index) const;

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

private:
  std::uint64_t key_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace hexact
