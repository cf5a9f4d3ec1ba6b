#include "hpboost/tape.hpp"

#include <bit>

namespace hpboost {

bool RandomTape::bit() {
  if (explicit_bits_) {
    if (position_ >= explicit_bits_->size()) {
      throw TapeExhausted("explicit random tape exhausted at bit " + std::to_string(position_));
    }
    return (*explicit_bits_)[position_++];
  }
  std::uint64_t word_index = position_ >> 6;
  if (word_index != cached_word_index_) {
    cached_word_ = mix64(seed_ + (word_index + 1) * kGoldenGamma);
    cached_word_index_ = word_index;
  }
  unsigned shift = 63U - static_cast<unsigned>(position_ & 63U);
  ++position_;
  return ((cached_word_ >> shift) & 1ULL) != 0;
}

std::uint64_t RandomTape::uniform(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform over an empty range");
  if (n == 1) return 0;
  const int bits = std::bit_width(n - 1);
  for (;;) {
    std::uint64_t v = 0;
    for (int i = 0; i < bits; ++i) v = (v << 1) | (bit() ? 1ULL : 0ULL);
    if (v < n) return v;
  }
}

RandomTape RandomTape::remaining() const {
  RandomTape t(seed_, position_);
  t.explicit_bits_ = explicit_bits_;
  return t;
}

}  // namespace hpboost
