#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hpboost {

/// SplitMix64 finalizer. Also used to derive per-trial seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

class TapeExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The random tape of a randomized online algorithm.
///
/// Word j of a seeded tape is mix64(seed + (j + 1) * kGoldenGamma), the j-th
/// output of a SplitMix64 stream; bit i is bit (63 - i % 64) of word i / 64,
/// i.e. words are read most significant bit first. The bit stream is therefore
/// a pure function of the seed and any suffix can be reopened with
/// RandomTape(seed, position).
///
/// An explicit tape holds a finite bit vector and throws TapeExhausted when
/// read past its end; exact enumeration oracles use it.
class RandomTape {
 public:
  explicit RandomTape(std::uint64_t seed, std::uint64_t position = 0)
      : seed_(seed), position_(position) {}

  static RandomTape from_bits(std::vector<bool> bits) {
    RandomTape t(0);
    t.explicit_bits_ = std::move(bits);
    return t;
  }

  bool bit();

  /// Uniform integer in [0, n). Reads ceil(log2 n) bits as an unsigned number
  /// (most significant first) and retries on values >= n. n == 1 reads nothing.
  std::uint64_t uniform(std::uint64_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return position_; }
  bool is_explicit() const noexcept { return explicit_bits_.has_value(); }

  /// A tape positioned at the current bit: same seed (or same explicit bits).
  RandomTape remaining() const;

 private:
  std::uint64_t seed_;
  std::uint64_t position_;
  std::uint64_t cached_word_index_ = ~0ULL;
  std::uint64_t cached_word_ = 0;
  std::optional<std::vector<bool>> explicit_bits_;
};

}  // namespace hpboost
