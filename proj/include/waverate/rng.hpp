#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace waverate {

//! Purpose of a random stream; part of the stream key so that different
//! consumers of the same (seed, index) never share draws.
enum class StreamRole : std::uint64_t
{
  innovations = 1,
  auxiliary = 2,
};

//! Identifies one independent random stream.
struct StreamKey
{
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  StreamRole role = StreamRole::innovations;
};

//! Counter-based generator (Philox4x32-10). The output at position i depends
//! only on the key and i, so streams can be generated in any order and on any
//! thread with identical results.
class CounterRng
{
public:
  using result_type = std::uint64_t;

  explicit CounterRng(StreamKey key);
  CounterRng(std::uint64_t seed,
             std::uint64_t index,
             StreamRole role = StreamRole::innovations)
    : CounterRng(StreamKey{ seed, index, role })
  {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max()
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  //! Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  //! Jump to the given 64-bit output position.
  void seek(std::uint64_t position);

private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_word_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned used_ = 2;
};

//! SplitMix64 finalizer; used for key derivation and hashing.
constexpr std::uint64_t
mix64(std::uint64_t z)
{
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace waverate
