#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace cylevy::mc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. Being a
/// pure function of (counter, key) it lets any number of streams be carved out
/// of one master seed without coordination.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// A replayable random stream identified by (master_seed, stream_index).
///
/// Satisfies UniformRandomBitGenerator, so it plugs into <random>
/// distributions. `counter` counts consumed 128-bit blocks; copying a stream
/// and replaying it yields the same bits.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : master_seed_(master_seed), stream_index_(stream_index) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 2) refill();
    return buffer_[lane_++];
  }

  /// Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }
  std::uint64_t counter() const { return counter_; }

  /// Rewind to the first block of the stream.
  void reset() {
    counter_ = 0;
    lane_ = 2;
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_index_), static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(master_seed_),
                                           static_cast<std::uint32_t>(master_seed_ >> 32)};
    const auto out = philox4x32_10(ctr, key);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++counter_;
    lane_ = 0;
  }

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_index_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int lane_ = 2;
};

/// Streams 0..n-1 of `master_seed`. Stream i is the one every experiment
/// assigns to path i.
inline std::vector<RngStream> make_streams(std::uint64_t master_seed, std::size_t n) {
  std::vector<RngStream> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) streams.emplace_back(master_seed, i);
  return streams;
}

}  // namespace cylevy::mc
