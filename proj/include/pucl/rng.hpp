#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace pucl {

// Seeded, portable random stream: xoshiro256++ core, states derived from
// (seed, stream_id) via splitmix64. The same (seed, stream_id) pair yields
// the same sequence on every platform; distinct stream ids give streams
// that are safe to use in parallel. Run manifests record kAlgorithm.
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "xoshiro256++ (splitmix64 seeded)";

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01();

  // Standard normal via Box-Muller; values are produced in pairs and the
  // second one is cached, so draw order is still fully deterministic.
  double normal();

  // Unbiased integer in [0, n), n >= 1 (rejection sampling).
  std::uint64_t below(std::uint64_t n);

  // Index draw proportional to non-negative weights. A non-positive total
  // falls back to a uniform draw (the D^2 rule for all-zero distances).
  std::size_t discrete(std::span<const double> weights);

  // Independent stream derived from this stream's identity, not its state.
  RngStream child(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace pucl
