#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "zkmlops/zk/field.hpp"
#include "zkmlops/zk/merkle.hpp"

namespace zkmlops::zk {

using LookupPair = std::pair<Fp, Fp>;

// Finite relation T of admissible (input, output) pairs.
class LookupTable {
 public:
  // Throws EmptyTable.
  explicit LookupTable(std::span<const LookupPair> rows);

  bool contains(const LookupPair& row) const { return rows_.count(key(row)) != 0; }
  std::size_t size() const { return rows_.size(); }
  Digest digest() const;

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  static Key key(const LookupPair& r) { return {r.first.value(), r.second.value()}; }
  std::set<Key> rows_;
};

// {(v, max(0, v)) : lo <= v <= hi}
LookupTable relu_table(std::int64_t lo, std::int64_t hi);

struct LookupOpening {
  std::uint64_t index = 0;
  LookupPair pair;
  LeafSalt salt{};
  MerklePath path;
};

struct LookupProof {
  Digest root{};
  std::uint64_t leaf_count = 0;
  std::uint32_t openings_requested = 0;
  std::vector<LookupOpening> openings;
};

// Commits to `pairs` and opens k Fiat-Shamir-selected leaves (with
// replacement). The prover does not check membership, so a proof over a
// fraction rho of bad pairs passes with probability (1 - rho)^k.
LookupProof prove_lookup(std::span<const LookupPair> pairs, const LookupTable& table, std::uint32_t k,
                         const Digest& randomness);
LookupProof prove_lookup(std::span<const LookupPair> pairs, const LookupTable& table, std::uint32_t k);

bool verify_lookup(const LookupProof& proof, const LookupTable& table);

}  // namespace zkmlops::zk
