#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkmlops/zk/fnn.hpp"
#include "zkmlops/zk/mpcith.hpp"

// Four-step reference backend for quantized FNN inference. The setup is
// transparent: keys are deterministic functions of public parameters, the
// model dimensions and (when binding) the weight commitment.
namespace zkmlops::zk {

struct SetupParameters {
  std::uint32_t repetitions = kDefaultRepetitions;
  bool bind_weights = true;

  std::string to_json() const;
  // Missing fields take their defaults; unknown fields are rejected.
  static SetupParameters from_json(std::string_view text);
};

// Parameter block embedded in both keys.
struct ProtocolParameters {
  std::uint64_t modulus = Fp::kModulus;
  std::uint32_t repetitions = kDefaultRepetitions;
  std::uint32_t relu_bits = kReluBits;
  std::uint32_t mimc_rounds = 0;
  std::uint64_t mimc_exponent = 0;
  std::vector<Fp> mimc_constants;

  static ProtocolParameters current(std::uint32_t repetitions);
  void write(ByteWriter& w) const;
  static ProtocolParameters read(ByteReader& r);

  friend bool operator==(const ProtocolParameters&, const ProtocolParameters&) = default;
};

struct ProvingKey {
  ProtocolParameters params;
  CompiledFnn compiled;

  Bytes serialize() const;
  static ProvingKey deserialize(ByteSpan bytes);
};

// Everything a verifier needs; carries no weight value.
struct VerificationKey {
  ProtocolParameters params;
  std::vector<std::uint32_t> dims;
  bool bind_weights = false;
  Digest circuit_digest{};
  std::uint32_t num_public_inputs = 0;
  std::uint32_t num_outputs = 0;
  std::optional<Fp> weight_commitment;

  Bytes serialize() const;
  static VerificationKey deserialize(ByteSpan bytes);
};

struct KeyPair {
  Bytes proving_key;
  Bytes verification_key;
};

// Throws InvalidModel or RangeOverflow.
KeyPair setup(const QuantizedFnn& model, const SetupParameters& params);

struct InferenceProof {
  Bytes proof;
  std::vector<std::int64_t> output;
  Statement statement;
};

// Runs the model on `input` inside the circuit and proves the result.
InferenceProof prove_inference(const QuantizedFnn& model, ByteSpan proving_key, std::span<const std::int64_t> input,
                               const Digest& randomness);
InferenceProof prove_inference(const QuantizedFnn& model, ByteSpan proving_key, std::span<const std::int64_t> input);

Statement make_statement(const VerificationKey& vk, std::span<const std::int64_t> input,
                         std::span<const std::int64_t> output);

// Rebuilds the circuit from the key's public shape, checks it against the
// key's digest, then verifies. Malformed keys or proofs yield a rejection.
Verdict verify_inference(ByteSpan verification_key, std::span<const std::int64_t> input,
                         std::span<const std::int64_t> output, ByteSpan proof);

}  // namespace zkmlops::zk
