#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "zkmlops/common/sha256.hpp"

namespace zkmlops::zk {

using LeafSalt = std::array<std::uint8_t, 16>;

struct MerklePath {
  std::vector<Digest> siblings;  // leaf level first
};

// Binary Merkle tree over salted leaves, padded to a power of two.
class MerkleTree {
 public:
  explicit MerkleTree(std::vector<Digest> leaves);

  const Digest& root() const { return levels_.back().front(); }
  std::size_t leaf_count() const { return leaf_count_; }
  // Throws IndexOutOfRange.
  MerklePath path(std::size_t index) const;

  static Digest hash_leaf(const LeafSalt& salt, ByteSpan payload);
  static bool verify(const Digest& root, std::size_t index, const Digest& leaf, const MerklePath& path);

 private:
  std::size_t leaf_count_;
  std::vector<std::vector<Digest>> levels_;
};

}  // namespace zkmlops::zk
