#pragma once

#include <cstdint>

namespace dks {

//! SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Counter-based generator: draw k of a stream is mix64(key + (k+1) * gamma).
//! Any draw can be recomputed from (key, k) alone, so streams derived per
//! work unit are independent of scheduling order.
class CounterRng
{
public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit CounterRng(std::uint64_t key)
    : key_(key)
  {}

  //! Stream for one (sample size, replicate) cell of a study.
  static CounterRng for_replicate(std::uint64_t seed,
                                  std::uint64_t sample_size,
                                  std::uint64_t replicate)
  {
    std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc908ULL);
    key = mix64(key ^ mix64(sample_size + 0x3c6ef372fe94f82bULL));
    key = mix64(key ^ mix64(replicate + 0xa54ff53a5f1d36f1ULL));
    return CounterRng(key);
  }

  std::uint64_t next_u64()
  {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform()
  {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace dks
