#pragma once

#include <array>
#include <cstdint>

namespace wpc::rng {

/// Philox4x32-10 block function (Salmon et al., counter-based RNG).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Uniform stream for one Monte Carlo trial. The draws depend only on
/// (seed, trial index, position in the stream), never on which thread or
/// batch evaluates the trial.
class CounterStream {
public:
  CounterStream(std::uint64_t seed, std::uint64_t trial)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trial_(trial) {}

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open() {
    if (cursor_ == 2) refill();
    const std::uint64_t bits = cache_[cursor_++];
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
  }

private:
  void refill() {
    const auto out = philox4x32({static_cast<std::uint32_t>(trial_),
                                 static_cast<std::uint32_t>(trial_ >> 32), block_, 0u},
                                key_);
    ++block_;
    cache_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    cache_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    cursor_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t trial_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> cache_{};
  int cursor_ = 2;
};

} // namespace wpc::rng
