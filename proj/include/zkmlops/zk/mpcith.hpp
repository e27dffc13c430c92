#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/common/sha256.hpp"
#include "zkmlops/zk/circuit.hpp"
#include "zkmlops/zk/field.hpp"

// Non-interactive MPC-in-the-head proofs for arithmetic circuits.
//
// Each repetition simulates a 3-party additive-sharing evaluation of the
// circuit. Linear gates are local; a multiplication of two secret wires
// uses the cross-term rule
//   z_i = x_i y_i + x_{i+1} y_i + x_i y_{i+1} + R_i - R_{i+1}   (indices mod 3)
// with R_i drawn from party i's seeded tape. Party views are committed with
// salted hashes, a Fiat-Shamir transcript over the statement, commitments
// and output shares yields e in {0,1,2}, and parties e and e+1 are opened.
// Soundness error per repetition is 2/3.
namespace zkmlops::zk {

inline constexpr std::uint8_t kProofVersion = 1;
inline constexpr std::uint32_t kDefaultRepetitions = 64;

using Seed = std::array<std::uint8_t, 16>;
using Salt = std::array<std::uint8_t, 16>;

struct Statement {
  Digest circuit_digest{};
  std::vector<Fp> inputs;   // x
  std::vector<Fp> outputs;  // y
  std::optional<Fp> weight_commitment;

  // x followed by C_W when present: the circuit's public input vector.
  std::vector<Fp> public_inputs() const;

  Bytes serialize() const;
  static Statement deserialize(ByteSpan bytes);

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct Witness {
  std::vector<Fp> values;
};

struct RepetitionProof {
  std::array<Digest, 3> commitments{};
  // Opened parties e and e+1, in that order.
  std::array<Seed, 2> seeds{};
  std::array<Salt, 2> salts{};
  // Input share of party 2 when it is opened, otherwise party 1's share.
  // Always present so the proof length does not depend on the challenge.
  std::vector<Fp> input_share;
  // Multiplication outputs of party e+1. Party e's are recomputed by the
  // verifier and checked through its commitment.
  std::vector<Fp> messages;
  std::array<std::vector<Fp>, 3> output_shares;
};

struct Proof {
  std::uint8_t version = kProofVersion;
  std::uint32_t multiplications = 0;
  std::uint32_t witness_length = 0;
  std::uint32_t output_length = 0;  // circuit outputs + secret assertion wires
  Digest transcript_digest{};
  std::vector<RepetitionProof> repetitions;

  // Size is a function of (multiplications, witness_length, output_length, t).
  Bytes serialize() const;
  // Throws MalformedProof on any structural defect.
  static Proof deserialize(ByteSpan bytes);
};

struct Verdict {
  bool accepted = false;
  std::string detail;
};

// Throws WitnessMismatch unless C(x, w) = y with every assertion satisfied.
Proof prove(const Statement& statement, const Witness& witness, const Circuit& circuit,
            std::uint32_t repetitions, const Digest& randomness);
// Same, with randomness from the operating system.
Proof prove(const Statement& statement, const Witness& witness, const Circuit& circuit,
            std::uint32_t repetitions);

Verdict verify(const Statement& statement, const Proof& proof, const Circuit& circuit);
// Parses first; throws MalformedProof for unparseable bytes.
Verdict verify(const Statement& statement, ByteSpan proof, const Circuit& circuit);

// Salted view commitment. The input share is only part of party 2's view;
// parties 0 and 1 derive theirs from the seed.
Digest commit_view(std::uint8_t party, const Seed& seed, const Salt& salt,
                   std::span<const Fp> input_share, std::span<const Fp> messages);

// Challenges implied by a proof's commitments and output shares.
std::vector<std::uint8_t> derive_challenges(const Statement& statement, const Proof& proof);

Digest random_digest();

namespace detail {

Seed party_seed(const Digest& randomness, std::uint32_t repetition, std::uint8_t party);
Salt party_salt(const Digest& randomness, std::uint32_t repetition, std::uint8_t party);

// Adds `delta` to one party's output at one secret multiplication gate, in
// every repetition. Used to model a cheating prover.
struct Tamper {
  std::uint32_t gate = 0;
  std::uint8_t party = 0;
  Fp delta;
};

// Proves without checking the witness. With a tamper the resulting proof
// attests to the shifted outputs, which are written to `claimed_outputs`.
Proof prove_unchecked(const Statement& statement, const Witness& witness, const Circuit& circuit,
                      std::uint32_t repetitions, const Digest& randomness,
                      const std::optional<Tamper>& tamper, std::vector<Fp>* claimed_outputs);

}  // namespace detail

}  // namespace zkmlops::zk
