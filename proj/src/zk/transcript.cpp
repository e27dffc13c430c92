#include "zkmlops/zk/transcript.hpp"

namespace zkmlops::zk {

class Transcript::Squeezer {
 public:
  explicit Squeezer(const Digest& state) : state_(state) {}

  std::uint8_t next_byte() {
    if (pos_ == block_.size()) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{next_byte()} << (8 * i);
    return v;
  }

 private:
  void refill() {
    Sha256 h;
    h.update(state_).update("squeeze").update_u64(counter_++);
    block_ = h.digest();
    pos_ = 0;
  }

  Digest state_;
  Digest block_{};
  std::size_t pos_ = block_.size();
  std::uint64_t counter_ = 0;
};

Transcript::Transcript(std::string_view domain_label) {
  hash_.update_u32(static_cast<std::uint32_t>(domain_label.size())).update(domain_label);
}

void Transcript::absorb(std::string_view tag, ByteSpan message) {
  hash_.update_u32(static_cast<std::uint32_t>(tag.size())).update(tag);
  hash_.update_u64(message.size()).update(message);
}

void Transcript::absorb(std::string_view tag, std::span<const Fp> elements) {
  hash_.update_u32(static_cast<std::uint32_t>(tag.size())).update(tag);
  hash_.update_u64(elements.size() * 8);
  for (Fp e : elements) hash_.update_u64(e.value());
}

std::vector<std::uint8_t> Transcript::challenge_trits(std::size_t count) const {
  Squeezer s(state());
  std::vector<std::uint8_t> out;
  out.reserve(count);
  while (out.size() < count) {
    std::uint8_t b = s.next_byte();
    if (b < 255) out.push_back(static_cast<std::uint8_t>(b % 3));
  }
  return out;
}

std::vector<std::uint64_t> Transcript::challenge_indices(std::size_t count, std::uint64_t bound) const {
  Squeezer s(state());
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (bound == 0) return out;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  while (out.size() < count) {
    std::uint64_t v = s.next_u64();
    if (v <= limit) out.push_back(v % bound);
  }
  return out;
}

}  // namespace zkmlops::zk
