#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkmlops/zk/circuit.hpp"

namespace zkmlops::zk {

inline constexpr std::int32_t kQuantMin = -128;
inline constexpr std::int32_t kQuantMax = 127;
// ReLU gadget width: pre-activations must satisfy |v| < 2^(kReluBits-1).
inline constexpr std::uint32_t kReluBits = 24;

// Dense feed-forward network with signed 8-bit weights, biases and inputs.
// ReLU between layers, identity after the last. weights[l] is row-major with
// shape dims[l+1] x dims[l].
struct QuantizedFnn {
  std::vector<std::uint32_t> dims;
  std::vector<std::vector<std::int32_t>> weights;
  std::vector<std::vector<std::int32_t>> biases;

  // Throws InvalidModel.
  void validate() const;
  std::size_t layer_count() const { return dims.empty() ? 0 : dims.size() - 1; }
  // Layer by layer: W_l row-major then b_l. This is the witness prefix and
  // the preimage of the weight commitment.
  std::vector<std::int32_t> flat_parameters() const;

  std::string to_json() const;
  static QuantizedFnn from_json(std::string_view text);

  static QuantizedFnn random(std::span<const std::uint32_t> dims, std::mt19937_64& rng);

  friend bool operator==(const QuantizedFnn&, const QuantizedFnn&) = default;
};

// Parses "d0-d1-...-dL".
std::vector<std::uint32_t> parse_dims(std::string_view spec);
std::string format_dims(std::span<const std::uint32_t> dims);

std::vector<std::int64_t> read_vector_json(std::string_view text, std::string_view field);
std::string write_vector_json(std::span<const std::int64_t> values, std::string_view field);

// Where each class of witness value lives in w.
struct WitnessLayout {
  std::uint32_t weights_offset = 0;
  std::uint32_t weights_count = 0;
  std::uint32_t bits_offset = 0;
  std::uint32_t bits_count = 0;
  // MiMC intermediates are circuit wires, not witness slots, so this range
  // is empty for circuits produced here.
  std::uint32_t hash_offset = 0;
  std::uint32_t hash_count = 0;
  std::vector<WitnessHint> hints;

  friend bool operator==(const WitnessLayout&, const WitnessLayout&) = default;
};

struct CompiledFnn {
  Circuit circuit;
  WitnessLayout layout;
  std::vector<std::uint32_t> dims;
  bool bind_weights = false;

  std::uint32_t input_count() const { return dims.front(); }
  std::uint32_t output_count() const { return dims.back(); }

  Bytes serialize() const;
  static CompiledFnn deserialize(ByteSpan bytes);
};

// Circuit structure only; depends on the dimensions and the binding flag,
// never on weight values. Public inputs are x followed by C_W when bound.
CompiledFnn compile_fnn_structure(std::span<const std::uint32_t> dims, bool bind_weights);

// Validates the model, checks every ReLU pre-activation bound against the
// gadget width (RangeOverflow), then compiles the structure.
CompiledFnn compile_fnn(const QuantizedFnn& model, bool bind_weights);

struct FnnAssignment {
  std::vector<Fp> public_inputs;  // x, then C_W when bound
  std::vector<Fp> witness;
  std::vector<Fp> outputs;
  std::optional<Fp> weight_commitment;
};

// Builds the witness for input x and evaluates the circuit (all assertions
// checked). Throws InvalidArgument for out-of-range inputs.
FnnAssignment assign_fnn(const QuantizedFnn& model, const CompiledFnn& compiled,
                         std::span<const std::int64_t> input);

Fp weight_commitment(const QuantizedFnn& model);

}  // namespace zkmlops::zk
