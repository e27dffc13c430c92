#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zkmlops/common/sha256.hpp"
#include "zkmlops/zk/field.hpp"

namespace zkmlops::zk {

// Fiat-Shamir transcript: a running SHA-256 seeded with a domain label.
// Every absorbed message is tagged and length-prefixed, so the challenge
// stream is a deterministic function of the exact message sequence.
class Transcript {
 public:
  explicit Transcript(std::string_view domain_label);

  void absorb(std::string_view tag, ByteSpan message);
  void absorb(std::string_view tag, std::span<const Fp> elements);
  void absorb(std::string_view tag, const Digest& d) { absorb(tag, ByteSpan(d)); }

  // Digest of everything absorbed so far.
  Digest state() const { return hash_.digest(); }

  // Uniform values in {0, 1, 2} (rejection-sampled bytes).
  std::vector<std::uint8_t> challenge_trits(std::size_t count) const;
  // Uniform indices in [0, bound).
  std::vector<std::uint64_t> challenge_indices(std::size_t count, std::uint64_t bound) const;

 private:
  class Squeezer;
  Sha256 hash_;
};

}  // namespace zkmlops::zk
