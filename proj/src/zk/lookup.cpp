#include "zkmlops/zk/lookup.hpp"

#include <algorithm>

#include "zkmlops/zk/mpcith.hpp"
#include "zkmlops/zk/transcript.hpp"

namespace zkmlops::zk {

namespace {

Bytes pair_payload(std::uint64_t index, const LookupPair& p) {
  ByteWriter w;
  w.u64(index);
  w.u64(p.first.value());
  w.u64(p.second.value());
  return std::move(w).take();
}

std::vector<std::uint64_t> opening_indices(const LookupTable& table, const Digest& root, std::uint64_t leaves,
                                           std::uint32_t k) {
  Transcript tr("zkmlops.lookup.v1");
  tr.absorb("table", table.digest());
  tr.absorb("root", root);
  ByteWriter w;
  w.u64(leaves);
  w.u32(k);
  tr.absorb("shape", w.bytes());
  return tr.challenge_indices(k, leaves);
}

}  // namespace

LookupTable::LookupTable(std::span<const LookupPair> rows) {
  if (rows.empty()) throw Error(Errc::EmptyTable, "lookup table is empty");
  for (const auto& r : rows) rows_.insert(key(r));
}

Digest LookupTable::digest() const {
  Sha256 h;
  h.update("zkmlops.lookup.table");
  h.update_u64(rows_.size());
  for (const auto& [x, y] : rows_) h.update_u64(x).update_u64(y);
  return h.digest();
}

LookupTable relu_table(std::int64_t lo, std::int64_t hi) {
  std::vector<LookupPair> rows;
  for (std::int64_t v = lo; v <= hi; ++v) rows.emplace_back(Fp::from_signed(v), Fp::from_signed(std::max<std::int64_t>(0, v)));
  return LookupTable(rows);
}

LookupProof prove_lookup(std::span<const LookupPair> pairs, const LookupTable& table, std::uint32_t k,
                         const Digest& randomness) {
  if (pairs.empty()) throw Error(Errc::InvalidArgument, "no pairs to prove");
  if (k == 0) throw Error(Errc::InvalidArgument, "at least one opening is required");
  std::vector<LeafSalt> salts(pairs.size());
  std::vector<Digest> leaves(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Sha256 h;
    h.update("zkmlops.lookup.salt").update(randomness).update_u64(i);
    auto d = h.digest();
    std::copy_n(d.begin(), salts[i].size(), salts[i].begin());
    leaves[i] = MerkleTree::hash_leaf(salts[i], pair_payload(i, pairs[i]));
  }
  MerkleTree tree(std::move(leaves));

  LookupProof proof;
  proof.root = tree.root();
  proof.leaf_count = pairs.size();
  proof.openings_requested = k;
  for (auto idx : opening_indices(table, proof.root, proof.leaf_count, k))
    proof.openings.push_back({idx, pairs[idx], salts[idx], tree.path(idx)});
  return proof;
}

LookupProof prove_lookup(std::span<const LookupPair> pairs, const LookupTable& table, std::uint32_t k) {
  return prove_lookup(pairs, table, k, random_digest());
}

bool verify_lookup(const LookupProof& proof, const LookupTable& table) {
  if (proof.leaf_count == 0 || proof.openings_requested == 0) return false;
  if (proof.openings.size() != proof.openings_requested) return false;
  auto expected = opening_indices(table, proof.root, proof.leaf_count, proof.openings_requested);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& o = proof.openings[i];
    if (o.index != expected[i]) return false;
    if (!table.contains(o.pair)) return false;
    if (!MerkleTree::verify(proof.root, o.index, MerkleTree::hash_leaf(o.salt, pair_payload(o.index, o.pair)), o.path))
      return false;
  }
  return true;
}

}  // namespace zkmlops::zk
