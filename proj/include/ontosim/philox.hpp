#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
// A draw is a pure function of (key, counter), so any partition of work
// over substreams reproduces the serial results bit for bit.

#include <array>
#include <cstdint>
#include <limits>

namespace ontosim {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Sequential view over the Philox counter space for one (seed, stream)
// pair. Counter layout: {index lo, index hi, stream lo, stream hi}.
// Models std::uniform_random_bit_generator.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 2) refill();
    const result_type v = (std::uint64_t{buffer_[2 * lane_]} << 32) | buffer_[2 * lane_ + 1];
    ++lane_;
    return v;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Modular reduction of a 64-bit draw; bias is at most n / 2^64.
  std::uint64_t below(std::uint64_t n) { return (*this)() % n; }

 private:
  void refill() {
    buffer_ = Philox4x32::block(
        {static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
    ++index_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter buffer_{};
  int lane_ = 2;
};

}  // namespace ontosim
