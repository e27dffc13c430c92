#include "zkmlops/zk/circuit.hpp"

#include <string>

namespace zkmlops::zk {

namespace {
constexpr std::uint8_t kCircuitVersion = 1;

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedProof, what); }
}  // namespace

void Circuit::validate() const {
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    auto earlier = [&](std::uint32_t w) {
      if (w >= i) malformed("gate " + std::to_string(i) + " reads a later wire");
    };
    switch (g.op) {
      case GateOp::Add:
      case GateOp::Mul:
        earlier(g.a);
        earlier(g.b);
        break;
      case GateOp::ScalarMul:
      case GateOp::AssertZero:
        earlier(g.a);
        break;
      case GateOp::Const:
        break;
      case GateOp::Input:
        if (g.a >= num_public_inputs) malformed("input index out of range");
        break;
      case GateOp::Witness:
        if (g.a >= num_witness) malformed("witness index out of range");
        break;
      default:
        malformed("unknown gate op");
    }
  }
  for (auto o : outputs)
    if (o >= gates.size()) malformed("output wire out of range");
}

Bytes Circuit::serialize() const {
  ByteWriter w;
  w.u8(kCircuitVersion);
  w.u32(num_public_inputs);
  w.u32(num_witness);
  w.u32(static_cast<std::uint32_t>(gates.size()));
  for (const Gate& g : gates) {
    w.u8(static_cast<std::uint8_t>(g.op));
    w.u32(g.a);
    w.u32(g.b);
    w.u64(g.c.value());
  }
  w.u32(static_cast<std::uint32_t>(outputs.size()));
  for (auto o : outputs) w.u32(o);
  return std::move(w).take();
}

Circuit Circuit::deserialize(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u8() != kCircuitVersion) malformed("unsupported circuit version");
  Circuit c;
  c.num_public_inputs = r.u32();
  c.num_witness = r.u32();
  std::uint32_t n = r.u32();
  if (static_cast<std::size_t>(n) * 17 > r.remaining()) malformed("gate count exceeds payload");
  c.gates.resize(n);
  for (auto& g : c.gates) {
    std::uint8_t op = r.u8();
    if (op > static_cast<std::uint8_t>(GateOp::AssertZero)) malformed("unknown gate op");
    g.op = static_cast<GateOp>(op);
    g.a = r.u32();
    g.b = r.u32();
    std::uint64_t v = r.u64();
    if (v >= Fp::kModulus) malformed("non-canonical field element");
    g.c = Fp(v);
  }
  std::uint32_t m = r.u32();
  if (static_cast<std::size_t>(m) * 4 > r.remaining()) malformed("output count exceeds payload");
  c.outputs.resize(m);
  for (auto& o : c.outputs) o = r.u32();
  r.expect_done();
  c.validate();
  return c;
}

Digest Circuit::digest() const {
  Sha256 h;
  h.update("zkmlops.circuit.v1");
  h.update(serialize());
  return h.digest();
}

std::size_t Circuit::multiplication_count() const {
  auto mask = public_wire_mask(*this);
  std::size_t n = 0;
  for (const Gate& g : gates)
    if (g.op == GateOp::Mul && !mask[g.a] && !mask[g.b]) ++n;
  return n;
}

std::vector<bool> public_wire_mask(const Circuit& circuit) {
  std::vector<bool> mask(circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    switch (g.op) {
      case GateOp::Input:
      case GateOp::Const: mask[i] = true; break;
      case GateOp::Witness: mask[i] = false; break;
      case GateOp::Add:
      case GateOp::Mul: mask[i] = mask[g.a] && mask[g.b]; break;
      case GateOp::ScalarMul:
      case GateOp::AssertZero: mask[i] = mask[g.a]; break;
    }
  }
  return mask;
}

namespace {

template <typename OnWitness>
std::vector<Fp> run(const Circuit& circuit, std::span<const Fp> public_inputs, bool check_asserts,
                    OnWitness&& witness_value) {
  if (public_inputs.size() != circuit.num_public_inputs)
    throw Error(Errc::ArityMismatch, "expected " + std::to_string(circuit.num_public_inputs) +
                                         " public inputs, got " + std::to_string(public_inputs.size()));
  std::vector<Fp> wires(circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    switch (g.op) {
      case GateOp::Add: wires[i] = wires[g.a] + wires[g.b]; break;
      case GateOp::Mul: wires[i] = wires[g.a] * wires[g.b]; break;
      case GateOp::ScalarMul: wires[i] = g.c * wires[g.a]; break;
      case GateOp::Const: wires[i] = g.c; break;
      case GateOp::Input: wires[i] = public_inputs[g.a]; break;
      case GateOp::Witness: wires[i] = witness_value(g.a, wires); break;
      case GateOp::AssertZero:
        wires[i] = wires[g.a];
        if (check_asserts && !wires[i].is_zero())
          throw Error(Errc::AssertionViolated, "assertion failed at gate " + std::to_string(i));
        break;
    }
  }
  return wires;
}

}  // namespace

std::vector<Fp> evaluate_wires(const Circuit& circuit, std::span<const Fp> public_inputs,
                               std::span<const Fp> witness) {
  if (witness.size() != circuit.num_witness)
    throw Error(Errc::ArityMismatch, "expected " + std::to_string(circuit.num_witness) +
                                         " witness values, got " + std::to_string(witness.size()));
  return run(circuit, public_inputs, true,
             [&](std::uint32_t idx, const std::vector<Fp>&) { return witness[idx]; });
}

std::vector<Fp> eval_circuit(const Circuit& circuit, std::span<const Fp> public_inputs,
                             std::span<const Fp> witness) {
  auto wires = evaluate_wires(circuit, public_inputs, witness);
  std::vector<Fp> out;
  out.reserve(circuit.outputs.size());
  for (auto o : circuit.outputs) out.push_back(wires[o]);
  return out;
}

std::vector<Fp> solve_witness(const Circuit& circuit, std::span<const WitnessHint> hints,
                              std::span<const Fp> public_inputs, std::vector<Fp> known) {
  if (known.size() != circuit.num_witness)
    throw Error(Errc::ArityMismatch, "witness template has wrong length");
  std::vector<const WitnessHint*> by_index(circuit.num_witness, nullptr);
  for (const auto& h : hints) {
    if (h.witness_index >= circuit.num_witness) throw Error(Errc::InvalidArgument, "hint out of range");
    by_index[h.witness_index] = &h;
  }
  run(circuit, public_inputs, false, [&](std::uint32_t idx, const std::vector<Fp>& wires) {
    if (const WitnessHint* h = by_index[idx]) {
      std::uint64_t shifted = (wires[h->source_wire] + h->offset).value();
      known[idx] = Fp((shifted >> h->bit) & 1U);
    }
    return known[idx];
  });
  return known;
}

CircuitBuilder::CircuitBuilder(std::uint32_t num_public_inputs) {
  circuit_.num_public_inputs = num_public_inputs;
}

std::uint32_t CircuitBuilder::push(Gate g) {
  circuit_.gates.push_back(g);
  return static_cast<std::uint32_t>(circuit_.gates.size() - 1);
}

std::uint32_t CircuitBuilder::input(std::uint32_t index) {
  if (index >= circuit_.num_public_inputs) throw Error(Errc::InvalidArgument, "input index out of range");
  return push({GateOp::Input, index, 0, Fp()});
}

std::uint32_t CircuitBuilder::witness() {
  return push({GateOp::Witness, circuit_.num_witness++, 0, Fp()});
}

std::uint32_t CircuitBuilder::witness_index_of(std::uint32_t wire) const {
  const Gate& g = circuit_.gates.at(wire);
  if (g.op != GateOp::Witness) throw Error(Errc::InvalidArgument, "wire is not a witness gate");
  return g.a;
}

std::uint32_t CircuitBuilder::constant(Fp c) {
  auto it = constants_.find(c.value());
  if (it != constants_.end()) return it->second;
  auto wire = push({GateOp::Const, 0, 0, c});
  constants_.emplace(c.value(), wire);
  return wire;
}

std::uint32_t CircuitBuilder::add(std::uint32_t a, std::uint32_t b) { return push({GateOp::Add, a, b, Fp()}); }

std::uint32_t CircuitBuilder::sub(std::uint32_t a, std::uint32_t b) {
  return add(a, scale(b, -Fp(1)));
}

std::uint32_t CircuitBuilder::mul(std::uint32_t a, std::uint32_t b) { return push({GateOp::Mul, a, b, Fp()}); }

std::uint32_t CircuitBuilder::scale(std::uint32_t a, Fp c) { return push({GateOp::ScalarMul, a, 0, c}); }

std::uint32_t CircuitBuilder::add_constant(std::uint32_t a, Fp c) { return add(a, constant(c)); }

void CircuitBuilder::assert_zero(std::uint32_t a) { push({GateOp::AssertZero, a, 0, Fp()}); }

void CircuitBuilder::assert_equal(std::uint32_t a, std::uint32_t b) { assert_zero(sub(a, b)); }

void CircuitBuilder::output(std::uint32_t wire) { circuit_.outputs.push_back(wire); }

std::uint32_t CircuitBuilder::relu(std::uint32_t v, std::uint32_t bits) {
  const Fp offset(std::uint64_t{1} << (bits - 1));
  std::uint32_t one = constant(Fp(1));
  std::uint32_t sum = 0;
  std::uint32_t sign = 0;
  for (std::uint32_t i = 0; i < bits; ++i) {
    std::uint32_t b = witness();
    hints_.push_back({witness_index_of(b), v, i, offset});
    assert_zero(mul(b, sub(one, b)));
    std::uint32_t term = i == 0 ? b : scale(b, Fp(std::uint64_t{1} << i));
    sum = i == 0 ? term : add(sum, term);
    if (i == bits - 1) sign = b;
  }
  assert_equal(sum, add_constant(v, offset));
  return mul(sign, v);
}

Circuit CircuitBuilder::build() && {
  circuit_.validate();
  return std::move(circuit_);
}

}  // namespace zkmlops::zk
