#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace srnbayes {

/// Counter-based random stream (Philox4x32-10). A stream is fully determined
/// by (seed, stream_id), so macro-replications and workers can draw from
/// disjoint stream ids without sharing mutable generator state. Identical
/// (seed, stream_id) reproduces the identical sequence on any platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream_id) {}

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(key_[0]) | (static_cast<std::uint64_t>(key_[1]) << 32);
  }
  std::uint64_t stream_id() const { return stream_; }

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      block(counter_, key_, buf_);
      ++counter_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_open01() { return 1.0 - uniform01(); }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double exponential(double rate) { return -std::log(uniform_open01()) / rate; }

  /// Index in [0, n) with probability proportional to weights[i] (sum > 0).
  int pick_weighted(const double* weights, int n, double total) {
    double u = uniform01() * total;
    for (int i = 0; i < n - 1; ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return n - 1;
  }

  /// One Philox4x32-10 block; exposed for test vectors.
  static void block(const std::array<std::uint32_t, 4>& ctr,
                    const std::array<std::uint32_t, 2>& key,
                    std::array<std::uint32_t, 4>& out) {
    std::array<std::uint32_t, 4> x = ctr;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * x[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * x[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    out = x;
  }

 private:
  void block(std::uint64_t block_index, const std::array<std::uint32_t, 2>& key,
             std::array<std::uint32_t, 4>& out) const {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_index), static_cast<std::uint32_t>(block_index >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    block(ctr, key, out);
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace srnbayes
