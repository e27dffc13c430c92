#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/common/sha256.hpp"
#include "zkmlops/zk/field.hpp"

namespace zkmlops::zk {

enum class GateOp : std::uint8_t {
  Add = 0,        // w[a] + w[b]
  Mul = 1,        // w[a] * w[b]
  ScalarMul = 2,  // c * w[a]
  Const = 3,      // c
  Input = 4,      // public input #a
  Witness = 5,    // witness value #a
  AssertZero = 6, // requires w[a] == 0; the gate's own wire carries w[a]
};

// Gate i defines wire i. Operands always reference strictly earlier wires.
struct Gate {
  GateOp op = GateOp::Const;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  Fp c;

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  std::vector<Gate> gates;
  std::uint32_t num_public_inputs = 0;
  std::uint32_t num_witness = 0;
  std::vector<std::uint32_t> outputs;

  // Throws MalformedProof on forward references or out-of-range indices.
  void validate() const;

  Bytes serialize() const;
  static Circuit deserialize(ByteSpan bytes);
  Digest digest() const;

  std::size_t multiplication_count() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

// Wires whose value is computable from public inputs and constants alone.
std::vector<bool> public_wire_mask(const Circuit& circuit);

// Plain evaluation returning every wire. Throws ArityMismatch or
// AssertionViolated (message names the gate index).
std::vector<Fp> evaluate_wires(const Circuit& circuit, std::span<const Fp> public_inputs,
                               std::span<const Fp> witness);

// C(x, w) -> y.
std::vector<Fp> eval_circuit(const Circuit& circuit, std::span<const Fp> public_inputs,
                             std::span<const Fp> witness);

// Witness value derived during solving: bit `bit` of the integer (wire + offset).
struct WitnessHint {
  std::uint32_t witness_index = 0;
  std::uint32_t source_wire = 0;
  std::uint32_t bit = 0;
  Fp offset;

  friend bool operator==(const WitnessHint&, const WitnessHint&) = default;
};

// Fills every hinted witness slot by evaluating the circuit in gate order;
// unhinted slots are taken from `known`. Assertions are not checked here.
std::vector<Fp> solve_witness(const Circuit& circuit, std::span<const WitnessHint> hints,
                              std::span<const Fp> public_inputs, std::vector<Fp> known);

// Incremental construction with constant de-duplication.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::uint32_t num_public_inputs);

  std::uint32_t input(std::uint32_t index);
  std::uint32_t witness();  // allocates the next witness slot
  std::uint32_t witness_index_of(std::uint32_t wire) const;
  std::uint32_t constant(Fp c);
  std::uint32_t add(std::uint32_t a, std::uint32_t b);
  std::uint32_t sub(std::uint32_t a, std::uint32_t b);
  std::uint32_t mul(std::uint32_t a, std::uint32_t b);
  std::uint32_t scale(std::uint32_t a, Fp c);
  std::uint32_t add_constant(std::uint32_t a, Fp c);
  void assert_zero(std::uint32_t a);
  void assert_equal(std::uint32_t a, std::uint32_t b);
  void output(std::uint32_t wire);

  // max(0, v) for |v| < 2^(bits-1): bits b_0..b_{bits-1} of v + 2^(bits-1)
  // are hinted witness values, each constrained boolean; the top bit is the
  // sign indicator s and the result is s * v.
  std::uint32_t relu(std::uint32_t v, std::uint32_t bits);

  const std::vector<WitnessHint>& hints() const { return hints_; }
  std::uint32_t num_witness() const { return circuit_.num_witness; }
  std::uint32_t wire_count() const { return static_cast<std::uint32_t>(circuit_.gates.size()); }
  Circuit build() &&;

 private:
  std::uint32_t push(Gate g);

  Circuit circuit_;
  std::vector<WitnessHint> hints_;
  std::unordered_map<std::uint64_t, std::uint32_t> constants_;
};

}  // namespace zkmlops::zk
