#include "zkmlops/zk/merkle.hpp"

#include "zkmlops/common/error.hpp"

namespace zkmlops::zk {

namespace {

Digest hash_node(const Digest& left, const Digest& right) {
  static constexpr std::uint8_t kTag = 0x01;
  Sha256 h;
  h.update(ByteSpan(&kTag, 1)).update(left).update(right);
  return h.digest();
}

const Digest& padding_leaf() {
  static const Digest d = sha256("zkmlops.merkle.padding");
  return d;
}

}  // namespace

MerkleTree::MerkleTree(std::vector<Digest> leaves) : leaf_count_(leaves.size()) {
  if (leaves.empty()) throw Error(Errc::InvalidArgument, "Merkle tree needs at least one leaf");
  std::size_t width = 1;
  while (width < leaves.size()) width *= 2;
  leaves.resize(width, padding_leaf());
  levels_.push_back(std::move(leaves));
  while (levels_.back().size() > 1) {
    const auto& below = levels_.back();
    std::vector<Digest> up(below.size() / 2);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = hash_node(below[2 * i], below[2 * i + 1]);
    levels_.push_back(std::move(up));
  }
}

MerklePath MerkleTree::path(std::size_t index) const {
  if (index >= leaf_count_) throw Error(Errc::IndexOutOfRange, "leaf index out of range");
  MerklePath p;
  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    p.siblings.push_back(levels_[level][index ^ 1U]);
    index >>= 1;
  }
  return p;
}

Digest MerkleTree::hash_leaf(const LeafSalt& salt, ByteSpan payload) {
  static constexpr std::uint8_t kTag = 0x00;
  Sha256 h;
  h.update(ByteSpan(&kTag, 1)).update(salt).update(payload);
  return h.digest();
}

bool MerkleTree::verify(const Digest& root, std::size_t index, const Digest& leaf, const MerklePath& path) {
  if (path.siblings.size() >= 64 || (index >> path.siblings.size()) != 0) return false;
  Digest acc = leaf;
  for (const auto& sib : path.siblings) {
    acc = (index & 1U) ? hash_node(sib, acc) : hash_node(acc, sib);
    index >>= 1;
  }
  return acc == root;
}

}  // namespace zkmlops::zk
