#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bsopt {

// Philox4x32-10 counter-based generator (Salmon et al. 2011) wrapped as a
// UniformRandomBitGenerator.  The key is the user seed, the upper counter
// words carry the stream id, so Philox(seed, l) for different l are
// independent streams that need no state to be shared between workers.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed = 0, std::uint64_t stream = 0) { reseed(seed, stream); }

  void reseed(std::uint64_t seed, std::uint64_t stream) {
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    pos_ = 4;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t hi = next32();
    const std::uint64_t lo = next32();
    return (hi << 32) | lo;
  }

  // uniform on ]0,1[, never 0 or 1
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  using Block = std::array<std::uint32_t, 4>;
  static Block bijection(Block ctr, std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  std::uint32_t next32() {
    if (pos_ == 4) {
      out_ = bijection(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      pos_ = 0;
    }
    return out_[pos_++];
  }

  std::array<std::uint32_t, 2> key_{};
  Block ctr_{};
  Block out_{};
  int pos_ = 4;
};

using Rng = Philox;

}  // namespace bsopt
