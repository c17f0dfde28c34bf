#include "pucl/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pucl/error.hpp"

namespace pucl {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = seed;
  std::uint64_t pre = splitmix64(x) ^ (kGolden * (stream_id + 1));
  std::uint64_t y = pre;
  for (auto& word : s_) word = splitmix64(y);
  // xoshiro state must not be all zero; splitmix64 output never is for
  // distinct words, but guard anyway.
  if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0,1] keeps the log finite.
  double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::kInvalidArgs, "RngStream::below: n must be >= 1");
  const std::uint64_t threshold = -n % n;  // == 2^64 mod n
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

std::size_t RngStream::discrete(std::span<const double> weights) {
  if (weights.empty()) fail(ErrorKind::kInvalidArgs, "discrete: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      fail(ErrorKind::kInvalidArgs, "discrete: weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) return static_cast<std::size_t>(below(weights.size()));
  double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

RngStream RngStream::child(std::uint64_t id) const {
  std::uint64_t x = seed_ ^ rotl(stream_id_ + 1, 32);
  std::uint64_t derived = splitmix64(x);
  return RngStream(derived, id);
}

}  // namespace pucl
