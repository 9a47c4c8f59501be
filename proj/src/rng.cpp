#include "waverate/rng.hpp"

namespace waverate {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void
mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4>
philox(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = { hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0 };
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

} // namespace

CounterRng::CounterRng(StreamKey key)
{
  const std::uint64_t k = mix64(key.seed);
  key_ = { static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32) };
  stream_word_ =
    mix64(mix64(key.index) ^ (static_cast<std::uint64_t>(key.role) << 56));
}

void
CounterRng::refill()
{
  const std::array<std::uint32_t, 4> ctr = {
    static_cast<std::uint32_t>(block_),
    static_cast<std::uint32_t>(block_ >> 32),
    static_cast<std::uint32_t>(stream_word_),
    static_cast<std::uint32_t>(stream_word_ >> 32),
  };
  const auto out = philox(ctr, key_);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  ++block_;
  used_ = 0;
}

std::uint64_t
CounterRng::next_u64()
{
  if (used_ == 2)
    refill();
  return buffer_[used_++];
}

double
CounterRng::uniform()
{
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

void
CounterRng::seek(std::uint64_t position)
{
  block_ = position / 2;
  used_ = 2;
  if (position % 2 == 1) {
    refill();
    used_ = 1;
  }
}

} // namespace waverate
