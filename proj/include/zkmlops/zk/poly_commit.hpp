#pragma once

#include <span>
#include <utility>
#include <vector>

#include "zkmlops/zk/field.hpp"
#include "zkmlops/zk/merkle.hpp"

namespace zkmlops::zk {

// Hash-based commitment to P(x) = sum c_i x^i: a Merkle tree over salted
// coefficient leaves. Salts make equal polynomials commit to different roots.
struct PolyOpeningState {
  std::vector<Fp> coefficients;
  std::vector<LeafSalt> salts;
  MerkleTree tree;
};

struct PolyOpening {
  LeafSalt salt{};
  MerklePath path;
};

std::pair<Digest, PolyOpeningState> poly_commit(std::span<const Fp> coefficients, const Digest& randomness);
std::pair<Digest, PolyOpeningState> poly_commit(std::span<const Fp> coefficients);

// (c_index, opening). Throws IndexOutOfRange.
std::pair<Fp, PolyOpening> poly_open(const PolyOpeningState& state, std::size_t index);

bool poly_verify_opening(const Digest& root, std::size_t index, Fp value, const PolyOpening& opening);

Fp poly_evaluate(std::span<const Fp> coefficients, Fp x);

}  // namespace zkmlops::zk
