#include "zkmlops/zk/poly_commit.hpp"

#include "zkmlops/zk/mpcith.hpp"

namespace zkmlops::zk {

namespace {

Bytes coefficient_payload(std::size_t index, Fp value) {
  ByteWriter w;
  w.u64(index);
  w.u64(value.value());
  return std::move(w).take();
}

std::vector<Digest> salted_leaves(std::span<const Fp> coefficients, const std::vector<LeafSalt>& salts) {
  std::vector<Digest> leaves;
  leaves.reserve(coefficients.size());
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    leaves.push_back(MerkleTree::hash_leaf(salts[i], coefficient_payload(i, coefficients[i])));
  return leaves;
}

}  // namespace

std::pair<Digest, PolyOpeningState> poly_commit(std::span<const Fp> coefficients, const Digest& randomness) {
  if (coefficients.empty()) throw Error(Errc::InvalidArgument, "cannot commit to an empty polynomial");
  std::vector<LeafSalt> salts(coefficients.size());
  for (std::size_t i = 0; i < salts.size(); ++i) {
    Sha256 h;
    h.update("zkmlops.poly.salt").update(randomness).update_u64(i);
    auto d = h.digest();
    std::copy_n(d.begin(), salts[i].size(), salts[i].begin());
  }
  MerkleTree tree(salted_leaves(coefficients, salts));
  Digest root = tree.root();
  return {root, PolyOpeningState{{coefficients.begin(), coefficients.end()}, std::move(salts), std::move(tree)}};
}

std::pair<Digest, PolyOpeningState> poly_commit(std::span<const Fp> coefficients) {
  return poly_commit(coefficients, random_digest());
}

std::pair<Fp, PolyOpening> poly_open(const PolyOpeningState& state, std::size_t index) {
  if (index >= state.coefficients.size()) throw Error(Errc::IndexOutOfRange, "coefficient index out of range");
  return {state.coefficients[index], PolyOpening{state.salts[index], state.tree.path(index)}};
}

bool poly_verify_opening(const Digest& root, std::size_t index, Fp value, const PolyOpening& opening) {
  auto leaf = MerkleTree::hash_leaf(opening.salt, coefficient_payload(index, value));
  return MerkleTree::verify(root, index, leaf, opening.path);
}

Fp poly_evaluate(std::span<const Fp> coefficients, Fp x) {
  Fp acc;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace zkmlops::zk
